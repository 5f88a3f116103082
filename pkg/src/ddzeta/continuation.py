"""Meromorphic continuation of Φ₂(s₁, s₂; 1, α̃) by the Mellin–Barnes method.

For α̃ = Λ, μ or a plug-in sequence the continuation is a finite sum of
residues plus one vertical contour integral:

    Φ₂ = [pole of Φ(w; α̃) at w = δ]  +  Σ_{k<N} [poles of Γ(-z) at z = k]
         + Σ_ρ [poles at z = -ρ]  +  (1/2πi Γ(s₂)) ∫_{(N-η)} Γ(s₂+z) Γ(-z) Φ(-z; α̃) ζ(s₁+s₂+z) dz.

At an even k ≥ 2 the trivial zero of ζ makes the k-th residue a double pole
and the Laurent data (D_k, c_k) of Φ(w; α̃) at w = -k enter.  Λ is the case
D_k = -1, c_k = a_k and weight -1 at every ρ; μ has D_k = 1/ζ'(-k) and weight
1/ζ'(ρ).  The hot loops (contour nodes, zero sums) run on flint balls.
"""

from __future__ import annotations

import math
import threading
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import mpmath
from flint import acb, arb

from . import _arb
from .exact_core import bernoulli
from .quadrature import QuadratureError, line_rule
from .series import LAMBDA, MU, SeriesKind, SeriesSpec
from .special_fn import PrecisionContext, laurent_constants, mangoldt_M
from .zeta_zeros import ZeroSumPolicy, ZeroTable, load_default_zeros, zero_sum_tail_bound

__all__ = [
    "SeriesKind",
    "SeriesSpec",
    "LAMBDA",
    "MU",
    "EvalParams",
    "EvalResult",
    "SingularityError",
    "ConditioningWarning",
    "classify_singularity",
    "eval_phi2",
    "eval_phi2_lambda",
    "eval_phi2_mu",
    "mellin_barnes_selftest",
    "min_valid_N",
]


class SingularityError(ArithmeticError):
    def __init__(self, matches: list, s1=None, s2=None):
        self.matches = matches
        names = ", ".join(m["set"] for m in matches)
        super().__init__(f"(s1, s2) = ({s1}, {s2}) lies on a singular set: {names}")


class ConditioningWarning(UserWarning):
    pass


@dataclass(frozen=True)
class EvalParams:
    N: int = 4
    eta: Fraction = Fraction(1, 7)
    T: object = None  # None: auto from the target precision
    zero_policy: ZeroSumPolicy = field(default_factory=ZeroSumPolicy)
    ctx: PrecisionContext = field(default_factory=PrecisionContext)
    zeros: ZeroTable | None = None
    auto_N: bool = True  # raise N when the contour would cut off a pole

    def __post_init__(self):
        if self.N < 2:
            raise ValueError("N must be >= 2")
        eta = Fraction(self.eta)
        if not 0 < eta < 1:
            raise ValueError("eta must lie in (0, 1)")
        object.__setattr__(self, "eta", eta)

    def auto_T(self, s1, s2) -> float:
        return (self.ctx.target_decimal * math.log(10) / math.pi
                + abs(float(mpmath.im(s1) + mpmath.im(s2))) + 10)

    def resolved_T(self, s1, s2) -> float:
        lo = self.auto_T(s1, s2)
        if self.T is None:
            return lo
        T = float(self.T)
        if T < lo - 1e-9:
            raise ValueError(f"T={T} is below the minimum {lo:.3f} for this precision")
        return T

    def table(self) -> ZeroTable:
        return self.zeros if self.zeros is not None else load_default_zeros(self.ctx)


def complex_json(z, digits: int) -> dict:
    z = mpmath.mpc(z)
    return {"re": mpmath.nstr(z.real, digits), "im": mpmath.nstr(z.imag, digits)}


@dataclass
class EvalResult:
    value: object
    terms: dict
    error_estimate: object
    params: dict
    singular: list | None = None

    def to_json(self, digits: int | None = None) -> dict:
        digits = digits or self.params.get("target_decimal", 30)
        return {
            "value": complex_json(self.value, digits),
            "terms": {k: complex_json(v, digits) for k, v in self.terms.items()},
            "error_estimate": mpmath.nstr(self.error_estimate, 6),
            "params": self.params,
        }


# --- singular sets -----------------------------------------------------------

def _near_int(x, tol):
    r = mpmath.nint(x)
    return abs(x - r) < tol, int(r)


def classify_singularity(s1, s2, series: SeriesSpec = LAMBDA, tol=None,
                         zeros: ZeroTable | None = None) -> list[dict]:
    """Every singular set of the selected series that contains (s1, s2) to within ``tol``."""
    s1, s2 = mpmath.mpmathify(s1), mpmath.mpmathify(s2)
    tol = mpmath.mpf(tol if tol is not None else mpmath.mpf(10) ** (-mpmath.mp.dps // 2))
    if not tol > 0:
        raise ValueError("tol must be positive")
    ss = s1 + s2
    out = []
    re2, im2 = mpmath.re(s2), mpmath.im(s2)
    res, ims = mpmath.re(ss), mpmath.im(ss)
    lam = series.kind is SeriesKind.LAMBDA
    delta = mpmath.mpf(1) if lam else (None if series.delta is None
                                       else mpmath.mpf(series.delta))
    # δ = 1 folds the δ-sets into s2 = 1 and s1+s2 = 2 - l, as for Λ
    one = delta == 1
    delta_sets = delta is not None and not one

    if one and abs(s2 - 1) < tol:
        out.append({"set": "s2=1", "params": {}})
    ok, l = _near_int(re2, tol)
    if ok and abs(im2) < tol and l <= -2:
        out.append({"set": "s2=-l", "params": {"l": -l}})
    ok, j = _near_int(res, tol)
    if ok and abs(ims) < tol:
        top = 2 if one else 1
        if j <= top:
            out.append({"set": f"s1+s2={top}-l", "params": {"l": top - j}})
    if delta_sets:
        ok, l = _near_int(re2 - delta, tol)
        # Γ(s2-δ)/Γ(s2) keeps only the poles s2 = 1..δ when δ is an integer
        d_int = delta == mpmath.floor(delta)
        if ok and abs(im2) < tol and l <= 0 and (not d_int or -l < delta):
            out.append({"set": "s2=-l+delta", "params": {"l": -l}})
        if abs(ss - 1 - delta) < tol:
            out.append({"set": "s1+s2=1+delta", "params": {}})

    # zero-dependent sets: s2 = -l + ρ and s1 + s2 = 1 + ρ, ρ = 1/2 ± iγ
    ok_l, l = _near_int(re2 - mpmath.mpf(0.5), tol)
    on_line = abs(res - mpmath.mpf(1.5)) < tol
    if (ok_l and l <= 0 and im2 != 0) or (on_line and ims != 0):
        table = zeros if zeros is not None else load_default_zeros()
        for n, g in enumerate(table.gammas, 1):
            for sign in (1, -1):
                if ok_l and l <= 0 and abs(im2 - sign * g) < tol:
                    out.append({"set": "s2=-l+rho", "params": {"l": -l, "n": n,
                                                               "conjugate": sign < 0}})
                if on_line and abs(ims - sign * g) < tol:
                    out.append({"set": "s1+s2=1+rho", "params": {"n": n, "conjugate": sign < 0}})
    return out


def min_valid_N(s1, s2, eta) -> int:
    """Smallest N for which the line Re z = N - eta keeps the poles of
    ζ(s1+s2+z) and Γ(s2+z) on its left at distance >= 1 - eta."""
    right = max(float(mpmath.re(1 - s1 - s2)), float(mpmath.re(-s2)))
    return max(2, math.ceil(right + 1 - 1e-12))


# --- residue data ------------------------------------------------------------

def _frac(q: Fraction):
    return mpmath.mpf(q.numerator) / q.denominator


_const_lock = threading.Lock()
_const_cache: dict = {}


def _lambda_constants(kmax: int, bits: int):
    """M(-k) for odd k, (D_k, c_k) = (-1, a_k) for even k, plus b_k."""
    key = ("lambda", kmax, bits)
    with _const_lock:
        if key in _const_cache:
            return _const_cache[key]
    with mpmath.workprec(bits + 30):
        ke = max(2, kmax + kmax % 2)
        lc = laurent_constants(ke)
        odd = {k: mangoldt_M(-k) for k in range(1, kmax + 1, 2)}
        even = {k: (mpmath.mpf(-1), lc.a[k]) for k in range(2, ke + 1, 2)}
        data = {"phi0": -mpmath.log(2 * mpmath.pi), "odd": odd, "even": even, "b": lc.b}
    with _const_lock:
        _const_cache[key] = data
    return data


def _mu_constants(kmax: int, bits: int):
    key = ("mu", kmax, bits)
    with _const_lock:
        if key in _const_cache:
            return _const_cache[key]
    with mpmath.workprec(bits + 30):
        ke = max(2, kmax + kmax % 2)
        lc = laurent_constants(ke)
        # Φ(-k; μ) = 1/ζ(-k) = -(k+1)/B_{k+1} for odd k
        odd = {k: mpmath.mpf(-(k + 1)) / _frac(bernoulli(k + 1))
               for k in range(1, kmax + 1, 2)}
        even = {k: (lc.D[k], lc.c[k]) for k in range(2, ke + 1, 2)}
        data = {"phi0": mpmath.mpf(-2), "odd": odd, "even": even, "b": lc.b}
    with _const_lock:
        _const_cache[key] = data
    return data


def _plugin_constants(series: SeriesSpec, kmax: int, bits: int):
    with mpmath.workprec(bits + 30):
        ke = max(2, kmax + kmax % 2)
        lc = laurent_constants(ke, phi_at_neg_k=series.phi_at_neg_k)
        odd = {k: mpmath.mpmathify(series.phi_at_neg_k(k)) / mpmath.zeta(-k)
               for k in range(1, kmax + 1, 2)}
        even = {k: (lc.D[k], mpmath.mpmathify(series.c_k(k))) for k in range(2, ke + 1, 2)}
        phi0 = mpmath.mpmathify(series.phi(mpmath.mpf(0))) / mpmath.zeta(0)
    return {"phi0": phi0, "odd": odd, "even": even, "b": lc.b}


def _series_key(series: SeriesSpec):
    # the spec itself, not id(): a collected spec's id can be reused
    return series.kind.value if series.kind is not SeriesKind.PLUGIN else ("plugin", series)


_kernel_lock = threading.Lock()
_kernel_cache: dict = {}
_zero_cache: dict = {}


def _kernel_fn(series: SeriesSpec):
    """z -> Γ(-z) Φ(-z; α̃) on flint balls."""
    kind = series.kind
    if kind is SeriesKind.LAMBDA:
        def K(z):
            w = -z
            zj = _arb.zeta_jet(w, 2)
            return w.gamma() * (-zj[1] / zj[0])
    elif kind is SeriesKind.MU:
        def K(z):
            w = -z
            return w.gamma() / w.zeta()
    else:
        def K(z):
            w = -z
            phi = _arb.to_acb(series.phi(_arb.to_mpc(w)))
            return w.gamma() * phi / w.zeta()
    return K


def _kernel(series, rule, c_arb, c_key, fbits):
    key = (_series_key(series), id(rule), c_key, fbits)
    with _kernel_lock:
        hit = _kernel_cache.get(key)
    if hit is not None and hit[0] is rule:
        return hit[1]
    K = _kernel_fn(series)
    i = acb(0, 1)
    full = [K(c_arb + i * _arb.to_arb(t)) for t in rule.t_full]
    half = [K(c_arb + i * _arb.to_arb(t)) for t in rule.t_half]
    end = K(c_arb + i * _arb.to_arb(rule.T))
    val = (full, half, end)
    with _kernel_lock:
        _kernel_cache[key] = (rule, val)
    return val


def _zero_data(series, table: ZeroTable, count: int, fbits: int):
    """(ρ, Γ(ρ), weight) for the first ``count`` zeros; weight is the residue
    of Φ(w; α̃) at w = ρ."""
    key = (_series_key(series), id(table), fbits)
    with _kernel_lock:
        cached = _zero_cache.get(key)
    if cached is not None and cached[0] is table and len(cached[1]) >= count:
        return cached[1][:count]
    out = []
    half = arb(1) / 2
    for g in table.gammas[:count]:
        rho = acb(half, _arb.to_arb(g))
        if series.kind is SeriesKind.LAMBDA:
            w = acb(-1)
        else:
            zp = _arb.zeta_jet(rho, 2)[1]
            if abs(_arb.to_mpc(zp)) < mpmath.mpf(10) ** (-mpmath.mp.dps // 2):
                warnings.warn(f"|ζ'(ρ)| is tiny at γ = {mpmath.nstr(g, 12)}", ConditioningWarning)
            w = 1 / zp
            if series.kind is SeriesKind.PLUGIN:
                w = w * _arb.to_acb(series.phi(_arb.to_mpc(rho)))
        out.append((rho, rho.gamma(), w))
    with _kernel_lock:
        _zero_cache[key] = (table, out)
    return out


# --- evaluator ---------------------------------------------------------------

_LABELS = {
    SeriesKind.LAMBDA: ("boundary", "log2pi"),
    SeriesKind.MU: (None, "constant"),
    SeriesKind.PLUGIN: ("delta", "constant"),
}


def _singular_points_t(s1, s2, c, N_eff):
    """s-dependent poles of the integrand mapped to the t-plane of z = c + it."""
    pts = []
    poles = [1 - s1 - s2] + [-s2 - l for l in range(0, N_eff + 3)]
    for zp in poles:
        zp = complex(zp)
        if c - zp.real < 3:
            q = (zp - c) / 1j
            pts.append(q)
    return tuple(pts)


def eval_phi2(s1, s2, series: SeriesSpec, p: EvalParams | None = None) -> EvalResult:
    p = p or EvalParams()
    ctx = p.ctx
    with ctx.working():
        s1, s2 = mpmath.mpc(s1), mpmath.mpc(s2)
        table = p.table()
        p.zero_policy.check(table)
        tol = mpmath.mpf(10) ** (-(ctx.target_decimal // 2))
        sing = classify_singularity(s1, s2, series, tol, table)
        if sing:
            raise SingularityError(sing, mpmath.nstr(s1, 15), mpmath.nstr(s2, 15))
        if s2.imag == 0 and s2.real <= -2 and s2.real == mpmath.floor(s2.real):
            raise SingularityError([{"set": "s2=-l", "params": {"l": int(-s2.real)}}])
        need = min_valid_N(s1, s2, p.eta)
        if p.N < need and not p.auto_N:
            raise ValueError(f"N={p.N} puts a pole right of the contour; need N >= {need}")
        N_eff = max(p.N, need)
        T = p.resolved_T(s1, s2)
        fbits = ctx.bits + 64
        with _arb.arb_prec(fbits):
            return _evaluate(s1, s2, series, p, table, N_eff, T, fbits)


def _evaluate(s1, s2, series, p, table, N_eff, T, fbits):
    ctx = p.ctx
    kind = series.kind
    real = s1.imag == 0 and s2.imag == 0
    S1, S2 = _arb.to_acb(s1), _arb.to_acb(s2)
    SS = S1 + S2
    rg = S2.rgamma()
    eta_arb = arb(p.eta.numerator) / p.eta.denominator
    c_arb = acb(arb(N_eff) - eta_arb)
    c_float = N_eff - float(p.eta)

    if kind is SeriesKind.LAMBDA:
        data = _lambda_constants(N_eff - 1, ctx.bits)
    elif kind is SeriesKind.MU:
        data = _mu_constants(N_eff - 1, ctx.bits)
    else:
        data = _plugin_constants(series, N_eff - 1, ctx.bits)

    pole_label, k0_label = _LABELS[kind]
    terms = {}
    errors = mpmath.mpf(0)

    # pole of Φ(w; α̃) at w = δ
    if kind is SeriesKind.LAMBDA:
        terms[pole_label] = (SS - 1).zeta() / (S2 - 1)
    elif kind is SeriesKind.PLUGIN and series.delta is not None:
        d = _arb.to_acb(series.delta)
        r = _arb.to_acb(series.residue_at_delta)
        terms[pole_label] = r * (S2 - d).gamma() * d.gamma() * (SS - d).zeta() * rg

    terms[k0_label] = _arb.to_acb(data["phi0"]) * SS.zeta()

    # k = 1 .. N-1
    odd_sum = acb(0)
    even_sum = acb(0)
    rf = acb(1)  # (s2)_k
    for k in range(1, N_eff):
        rf = rf * (S2 + (k - 1))
        binom = rf / factorial(k) * (-1 if k % 2 else 1)  # binom(-s2, k)
        w = SS + k
        if k % 2:
            odd_sum += binom * _arb.to_acb(data["odd"][k]) * w.zeta()
        else:
            D, ck = (_arb.to_acb(v) for v in data["even"][k])
            bk = _arb.to_acb(data["b"][k])
            zw, dzw = _arb.zeta_jet(w, 2)[:2]
            psi = (S2 + k).digamma() if rf != 0 else acb(0)
            even_sum += (binom * (ck * zw + factorial(k) * bk * D * zw - D * dzw)
                         - D / factorial(k) * rf * psi * zw)
    terms["odd_k"] = odd_sum
    terms["even_k"] = even_sum

    # nontrivial zeros
    zsum, used, zbound = _zero_sum(s1, s2, S2, SS, rg, series, table, p, fbits, real)
    terms["zero_sum"] = zsum
    errors += zbound

    # contour integral
    cint, qerr = _contour(s1, s2, S2, SS, rg, series, p, N_eff, T, c_arb, c_float, fbits, real)
    terms["contour"] = cint
    errors += qerr

    rounding = mpmath.mpf(0)
    out_terms = {}
    for k, v in terms.items():
        rounding += _arb.radius(v)
        out_terms[k] = _arb.to_mpc(v)
    # sequential sum in the caller's precision, reproducible from `terms`
    total = mpmath.mpc(0)
    for v in out_terms.values():
        total += v
    errors += rounding + abs(total) * mpmath.mpf(2) ** (-ctx.bits)
    params = {
        "series": series.label,
        "N": p.N,
        "N_effective": N_eff,
        "eta": str(p.eta),
        "T": repr(round(T, 6)),
        "zeros_used": used,
        "max_zeros": p.zero_policy.max_zeros,
        "target_decimal": ctx.target_decimal,
        "bits": ctx.bits,
        "s1": complex_json(s1, ctx.target_decimal),
        "s2": complex_json(s2, ctx.target_decimal),
    }
    return EvalResult(total, out_terms, errors, params)


def _zero_sum(s1, s2, S2, SS, rg, series, table, p, fbits, real):
    policy = p.zero_policy
    count = policy.max_zeros
    tol = policy.tolerance()
    rg_abs = abs(_arb.to_mpc(rg))
    total = acb(0)
    if count == 0:
        return total, 0, mpmath.inf
    zdata = _zero_data(series, table, count, fbits)
    floor_g = max(abs(float(s2.imag)), abs(float((s1 + s2).imag))) + 10
    weighted = series.kind is not SeriesKind.LAMBDA
    bound = mpmath.inf
    used = 0
    for n, (rho, grho, w) in enumerate(zdata):
        t = w * (S2 - rho).gamma() * grho * (SS - rho).zeta()
        if real:
            t = 2 * acb(t.real)
        else:
            rc = rho.conjugate()
            t += w.conjugate() * (S2 - rc).gamma() * grho.conjugate() * (SS - rc).zeta()
        total += t
        used = n + 1
        g = table.gammas[n]
        if g > floor_g:
            if rg_abs == 0:
                bound = mpmath.mpf(0)
                break
            bound = rg_abs * zero_sum_tail_bound(s2, g, s1 + s2, weighted)
            if bound < tol:
                break
    return total * rg, used, bound


def _contour(s1, s2, S2, SS, rg, series, p, N_eff, T, c_arb, c_float, fbits, real):
    ctx = p.ctx
    if _arb.to_mpc(rg) == 0:
        return acb(0), mpmath.mpf(0)
    dmin = min(float(p.eta), 1 - float(p.eta))
    rule = line_rule(dmin, T, ctx.dps, ctx.bits)
    pts = _singular_points_t(s1, s2, c_float, N_eff)
    if not real:
        pts = pts + tuple(-q for q in pts)
    if pts and not rule.covers(pts):
        rule = line_rule(dmin, T, ctx.dps, ctx.bits, False, pts)
    c_key = (N_eff, str(p.eta))
    Kf, Kh, Kend = _kernel(series, rule, c_arb, c_key, fbits)
    i = acb(0, 1)

    def g(t, K):
        ta = _arb.to_arb(t)
        z = c_arb + i * ta
        v = (S2 + z).gamma() * K * (SS + z).zeta()
        if real:
            return 2 * acb(v.real)
        zc = c_arb - i * ta
        return v + (S2 + zc).gamma() * K.conjugate() * (SS + zc).zeta()

    vf = [g(t, K) for t, K in zip(rule.t_full, Kf)]
    vh = [g(t, K) for t, K in zip(rule.t_half, Kh)]
    vend = g(rule.T, Kend)
    rad = max(_arb.radius(v) for v in vf)
    integral, qerr = rule.combine([_arb.to_mpc(v) for v in vf], [_arb.to_mpc(v) for v in vh])
    scale = _arb.to_mpc(rg) / (2 * mpmath.pi)
    # exponential decay e^{-π t} beyond T: tail ≈ |g(T)|/π, doubled for safety
    tail = 2 * abs(_arb.to_mpc(vend)) / mpmath.pi
    err = abs(scale) * (qerr + tail + rad * rule.T)
    if not mpmath.isfinite(err):
        raise QuadratureError("contour quadrature produced a non-finite estimate")
    value = _arb.to_acb(integral * scale)
    return value, err


def eval_phi2_lambda(s1, s2, p: EvalParams | None = None) -> EvalResult:
    return eval_phi2(s1, s2, LAMBDA, p)


def eval_phi2_mu(s1, s2, p: EvalParams | None = None) -> EvalResult:
    return eval_phi2(s1, s2, MU, p)


# --- calibration -------------------------------------------------------------

def mellin_barnes_selftest(s, lam, c, p: EvalParams | None = None):
    """(1/2πi) ∫_{(c)} Γ(s+z)Γ(-z)/Γ(s) λ^z dz against (1+λ)^{-s}."""
    p = p or EvalParams()
    ctx = p.ctx
    with ctx.working():
        s, lam, c = mpmath.mpc(s), mpmath.mpc(lam), mpmath.mpf(c)
        if not s.real > 0:
            raise ValueError("need Re s > 0")
        if not -s.real < c < 0:
            raise ValueError("need -Re s < c < 0")
        if lam == 0 or (lam.imag == 0 and lam.real < 0):
            raise ValueError("need λ != 0 and |arg λ| < π")
        arg = abs(float(mpmath.arg(lam)))
        decay = math.pi - arg
        T = ctx.dps * math.log(10) / decay + abs(float(s.imag)) + 10
        dmin = min(-float(c), float(c + s.real))
        if dmin <= 0:
            raise ValueError("contour passes through a pole")
        pts = tuple(complex((-s - l - c) / 1j) for l in range(3))
        pts = pts + tuple(-q for q in pts)
        rule = line_rule(dmin, T, ctx.dps, ctx.bits)
        if not rule.covers(pts):
            rule = line_rule(dmin, T, ctx.dps, ctx.bits, False, pts)
        fbits = ctx.bits + 64
        with _arb.arb_prec(fbits):
            S, L, C = _arb.to_acb(s), _arb.to_acb(lam), _arb.to_acb(c)
            logl = L.log()
            i = acb(0, 1)

            def f(t):
                ta = _arb.to_arb(t)
                tot = acb(0)
                for z in (C + i * ta, C - i * ta):
                    tot += (S + z).gamma() * (-z).gamma() * (z * logl).exp()
                return _arb.to_mpc(tot)

            vf = [f(t) for t in rule.t_full]
            vh = [f(t) for t in rule.t_half]
            integral, _ = rule.combine(vf, vh)
            value = integral / (2 * mpmath.pi * mpmath.gamma(s))
        return +value, (1 + lam) ** (-s)
