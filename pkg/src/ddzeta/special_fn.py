"""Arbitrary-precision special functions on top of mpmath.

Everything here works at the ambient mpmath precision; callers that own a
:class:`PrecisionContext` enter it with ``with ctx.working():``.

Γ, log Γ, ψ and ψ' are thin wrappers over mpmath.  ζ and its first two
derivatives are computed here: Euler–Maclaurin in the half plane Re s >= 1/2
(evaluated on a second-order Taylor jet in s, so all three derivatives come
out of one pass), and the functional equation elsewhere.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial

import mpmath
from mpmath import mp

from .exact_core import GammaLinear, bernoulli

__all__ = [
    "PoleError",
    "PrecisionContext",
    "EulerMaclaurinPolicy",
    "LaurentConstants",
    "gamma",
    "loggamma",
    "digamma",
    "trigamma",
    "zeta_d",
    "mangoldt_M",
    "laurent_constants",
    "C_kn",
    "C_kn_closed",
    "euler_gamma",
]


class PoleError(ArithmeticError):
    """Evaluation requested at (or numerically indistinguishable from) a pole."""


@dataclass(frozen=True)
class PrecisionContext:
    target_decimal: int = 80
    guard_digits: int = 20
    bits: int = 0

    def __post_init__(self):
        need = math.ceil((self.target_decimal + self.guard_digits) * math.log2(10))
        if self.bits == 0:
            object.__setattr__(self, "bits", need)
        elif self.bits < need:
            raise ValueError(f"bits={self.bits} below the {need} needed for "
                             f"{self.target_decimal}+{self.guard_digits} digits")

    @property
    def dps(self) -> int:
        return self.target_decimal + self.guard_digits

    def working(self):
        return mpmath.workprec(self.bits)


@dataclass(frozen=True)
class EulerMaclaurinPolicy:
    """Cutoff choice for the Euler–Maclaurin ζ evaluator.

    The direct-sum length is ``k_min + k_digits*dps + k_height*|Im s|`` and
    correction terms are added until they drop below the working epsilon.
    """

    k_min: int = 12
    k_digits: float = 0.35
    k_height: float = 0.2
    max_terms: int = 400

    def cutoff(self, s) -> int:
        return int(self.k_min + self.k_digits * mp.dps + self.k_height * abs(s))


DEFAULT_EM_POLICY = EulerMaclaurinPolicy()


def _is_nonpositive_int(s) -> bool:
    s = mpmath.mpmathify(s)
    if mpmath.im(s) != 0:
        return False
    r = mpmath.re(s)
    return r <= 0 and r == mpmath.floor(r)


def gamma(s):
    if _is_nonpositive_int(s):
        raise PoleError(f"Γ has a pole at {s}")
    return mpmath.gamma(s)


def loggamma(s):
    if _is_nonpositive_int(s):
        raise PoleError(f"log Γ has a pole at {s}")
    return mpmath.loggamma(s)


def digamma(s):
    if _is_nonpositive_int(s):
        raise PoleError(f"ψ has a pole at {s}")
    return mpmath.digamma(s)


def trigamma(s):
    if _is_nonpositive_int(s):
        raise PoleError(f"ψ' has a pole at {s}")
    return mpmath.psi(1, s)


def euler_gamma():
    return +mp.euler


# --- jets: truncated Taylor series c0 + c1*δ + c2*δ² ----------------------

def _jmul(a, b):
    return (a[0] * b[0], a[0] * b[1] + a[1] * b[0],
            a[0] * b[2] + a[1] * b[1] + a[2] * b[0])


def _jadd(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def _jscale(a, c):
    return (a[0] * c, a[1] * c, a[2] * c)


def _power_jet(base_log, s):
    """Jet of base^{-(s+δ)} given log(base)."""
    v = mpmath.exp(-s * base_log)
    return (v, -v * base_log, v * base_log * base_log / 2)


_bern_mpf_cache: dict[tuple[int, int], object] = {}
_bern_lock = threading.Lock()


def _bern_ratio(j: int):
    """B_{2j}/(2j)! at the current precision."""
    key = (j, mp.prec)
    v = _bern_mpf_cache.get(key)
    if v is None:
        b = bernoulli(2 * j) / factorial(2 * j)
        v = mpmath.mpf(b.numerator) / b.denominator
        with _bern_lock:
            _bern_mpf_cache[key] = v
    return v


def _zeta_em_jet(s, policy: EulerMaclaurinPolicy):
    """(ζ(s), ζ'(s), ζ''(s)/2) by Euler–Maclaurin, Re s >= 1/2."""
    K = policy.cutoff(s)
    acc = (mpmath.mpf(0), mpmath.mpf(0), mpmath.mpf(0))
    for n in range(1, K):
        acc = _jadd(acc, _power_jet(mpmath.log(n), s))
    logK = mpmath.log(K)
    EK = _power_jet(logK, s)  # K^{-s}
    acc = _jadd(acc, _jscale(EK, mpmath.mpf(1) / 2))
    # K^{1-s}/(s-1)
    a = s - 1
    inv = (1 / a, -1 / a ** 2, 1 / a ** 3)
    acc = _jadd(acc, _jscale(_jmul(EK, inv), K))
    # sum_j B_{2j}/(2j)! (s)_{2j-1} K^{-s-2j+1}
    poch = (s, mpmath.mpf(1), mpmath.mpf(0))
    eps = mpmath.eps * (1 + abs(acc[0]))
    prev = None
    for j in range(1, policy.max_terms):
        if j > 1:
            poch = _jmul(poch, (s + 2 * j - 3, mpmath.mpf(1), mpmath.mpf(0)))
            poch = _jmul(poch, (s + 2 * j - 2, mpmath.mpf(1), mpmath.mpf(0)))
        kpow = mpmath.mpf(K) ** (1 - 2 * j)
        term = _jscale(_jmul(poch, EK), _bern_ratio(j) * kpow)
        acc = _jadd(acc, term)
        size = max(abs(term[0]), abs(term[1]), abs(term[2]))
        if size < eps:
            return acc
        if prev is not None and size > prev and j > 8:
            break
        prev = size
    # asymptotic series started diverging: retry with a longer direct sum
    return _zeta_em_jet(s, EulerMaclaurinPolicy(policy.k_min * 2, policy.k_digits * 2,
                                                policy.k_height * 2, policy.max_terms))


def _zeta_reflect(s, d: int, policy: EulerMaclaurinPolicy):
    """ζ^{(d)}(s) via ζ(s) = g(s) ζ(1-s), g = 2^s π^{s-1} sin(πs/2) Γ(1-s).

    sin and cos are kept explicit so that g' and g'' stay finite at the
    trivial zeros.
    """
    Z0, Z1, Z2h = _zeta_em_jet(1 - s, policy)
    Z2 = 2 * Z2h
    pi = mp.pi
    chi0 = mpmath.power(2, s) * mpmath.power(pi, s - 1) * mpmath.gamma(1 - s)
    S = mpmath.sinpi(s / 2)
    Cs = mpmath.cospi(s / 2)
    if d == 0:
        return chi0 * S * Z0
    lam = mpmath.log(2 * pi) - mpmath.digamma(1 - s)
    g = chi0 * S
    g1 = chi0 * (lam * S + pi / 2 * Cs)
    if d == 1:
        return g1 * Z0 - g * Z1
    lam1 = mpmath.psi(1, 1 - s)
    g2 = chi0 * ((lam * lam + lam1) * S + lam * pi * Cs - pi * pi / 4 * S)
    return g2 * Z0 - 2 * g1 * Z1 + g * Z2


def zeta_d(s, d: int = 0, policy: EulerMaclaurinPolicy = DEFAULT_EM_POLICY):
    """d-th derivative of the Riemann zeta function, d in {0, 1, 2}."""
    if d not in (0, 1, 2):
        raise ValueError("d must be 0, 1 or 2")
    s = mpmath.mpmathify(s)
    if s == 1:
        raise PoleError("ζ has a pole at s = 1")
    with mpmath.extraprec(10 + int(math.log2(2 + abs(s)))):
        # near s = 0 the reflected argument sits on the pole; Euler–Maclaurin
        # is still valid there
        if mpmath.re(s) >= 0.5 or abs(s) <= 0.5:
            jet = _zeta_em_jet(s, policy)
            v = jet[d] * (2 if d == 2 else 1)
        else:
            v = _zeta_reflect(s, d, policy)
    v = +v
    if mpmath.im(v) == 0 and not isinstance(s, mpmath.mpc):
        return mpmath.re(v)
    return v


def mangoldt_M(s):
    """M(s) = -ζ'(s)/ζ(s), reflected for Re s < 1/2:

    M(s) = -log 2π - (π/2) cot(πs/2) + ψ(1-s) - M(1-s).
    """
    s = mpmath.mpmathify(s)
    if s == 1:
        raise PoleError("M has a pole at s = 1")
    threshold = mpmath.mpf(10) ** (-(mp.dps // 2))
    with mpmath.extraprec(10):
        if mpmath.re(s) >= 0.5:
            z0 = zeta_d(s, 0)
            if abs(z0) < threshold:
                raise PoleError(f"|ζ(s)| = {mpmath.nstr(abs(z0), 5)} at {s}: too close to a zero")
            v = -zeta_d(s, 1) / z0
        else:
            if _is_nonpositive_int(s) and int(mpmath.re(s)) % 2 == 0 and s != 0:
                raise PoleError(f"M has a pole at the trivial zero {s}")
            if s == 0:
                return -mpmath.log(2 * mp.pi)
            v = (-mpmath.log(2 * mp.pi) - mp.pi / 2 * mpmath.cot(mp.pi * s / 2)
                 + mpmath.digamma(1 - s) - mangoldt_M(1 - s))
    return +v


# --- Laurent constants -----------------------------------------------------

def b_exact(l: int) -> GammaLinear:
    """Constant term of Γ at -l: (-1)^l/l! (H_l - γ)."""
    sign = Fraction((-1) ** l, factorial(l))
    H = sum((Fraction(1, j) for j in range(1, l + 1)), Fraction(0))
    return GammaLinear(sign * H, -sign)


def C_kn_closed(k: int, n: int):
    """Closed form (-1)^k n!/(n-k)! (H_n - γ) of the constant in the
    expansion of Γ'(-n+k+ε)/Γ(-n+ε).  Used as an independent check."""
    H = sum((Fraction(1, j) for j in range(1, n + 1)), Fraction(0))
    p0 = Fraction((-1) ** k * factorial(n), factorial(n - k))
    return GammaLinear(p0 * H, -p0).evaluate(euler_gamma())


def _richardson(values, ratio=2):
    """Neville/Richardson tableau for values f(h0/ratio^j) with
    f = c0 + c1 h + c2 h^2 + ...; returns (estimate, last correction)."""
    T = list(values)
    corr = None
    for level in range(1, len(T)):
        fac = mpmath.mpf(ratio) ** level
        new = [(fac * T[j + 1] - T[j]) / (fac - 1) for j in range(len(T) - 1)]
        corr = abs(new[-1] - T[-1])
        T = new
    return T[0], corr


def C_kn(k: int, n: int, eps0=None, levels: int = 24):
    """Constant C(k, n) in Γ'(-n+k+ε)/Γ(-n+ε) = (-1)^{k-1} n!/((n-k)! ε) + C + O(ε),
    extracted by Richardson extrapolation over ε = eps0 / 2^j."""
    if not (k >= 1 and k <= n):
        raise ValueError("need 1 <= k <= n")
    pole = mpmath.mpf((-1) ** (k - 1) * factorial(n)) / factorial(n - k)
    with mpmath.extraprec(levels + 40):
        e0 = mpmath.mpf(1) / 8 if eps0 is None else mpmath.mpf(eps0)
        vals = []
        for j in range(levels):
            e = e0 / 2 ** j
            ratio = mpmath.rf(-n + e, k)  # Γ(-n+k+ε)/Γ(-n+ε)
            vals.append(mpmath.digamma(-n + k + e) * ratio - pole / e)
        est, _ = _richardson(vals)
    return +est


@dataclass
class LaurentConstants:
    """Laurent data at the trivial zeros and at the poles of Γ.

    ``a[k]``: constant term of M at -k; ``b[l]`` (with exact form ``b_exact[l]``):
    constant term of Γ at -l; ``c[k]``: constant term of Φ(s;α)/ζ(s) at -k;
    ``D[k] = Φ(-k;α)/ζ'(-k)`` and its closed-form twin ``D_closed[k]``;
    ``C[(k, n)]`` from the Γ'/Γ expansion.
    """

    a: dict = field(default_factory=dict)
    b: dict = field(default_factory=dict)
    b_exact: dict = field(default_factory=dict)
    c: dict = field(default_factory=dict)
    D: dict = field(default_factory=dict)
    D_closed: dict = field(default_factory=dict)
    C: dict = field(default_factory=dict)
    zeta1: dict = field(default_factory=dict)
    zeta2: dict = field(default_factory=dict)


def laurent_constants(kmax: int, n_list=(), phi_at_neg_k=None) -> LaurentConstants:
    """Constants a_k, b_l, c_k, D_k (even k <= kmax, l <= kmax) and C(k, n).

    ``phi_at_neg_k`` gives Φ(-k; α); the default 1 is the Möbius series.
    """
    if kmax < 2 or kmax % 2:
        raise ValueError("kmax must be even and >= 2")
    phi = phi_at_neg_k or (lambda k: mpmath.mpf(1))
    out = LaurentConstants()
    g = euler_gamma()
    for l in range(kmax + 1):
        out.b_exact[l] = b_exact(l)
        out.b[l] = out.b_exact[l].evaluate(g)
    for k in range(2, kmax + 1, 2):
        z1 = zeta_d(-k, 1)
        z2 = zeta_d(-k, 2)
        out.zeta1[k], out.zeta2[k] = z1, z2
        out.a[k] = -z2 / (2 * z1)
        pk = phi(k)
        out.D[k] = pk / z1
        out.D_closed[k] = ((-1) ** (k // 2) * 2 * (2 * mp.pi) ** k * pk
                           / (factorial(k) * zeta_d(k + 1, 0)))
        # Möbius-series c_k; plug-in series carry their own
        out.c[k] = -z2 / (2 * z1 * z1)
    for n in n_list:
        for k in range(2, n + 1, 2):
            out.C[(k, n)] = C_kn(k, n)
    return out
