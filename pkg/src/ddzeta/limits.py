"""Behaviour of Φ₂ at the points (s₁, s₂) = (-m, -n).

Near such a point we fix s₁ = -m and let s₂ = -n + ε, so

    Φ₂(-m, -n+ε) = c2/ε² + c1/ε + c0 + O(ε),

and the reverse value is c0 when c1 = c2 = 0.  The coefficients are
recovered from a geometric ε-ladder by linear least squares; the closed
forms below are the ones they are compared against.

Sign note for Λ: at m >= 0 the continuation yields c1 = -R(-m,-n) and at
m <= -1 it yields c2 = -2·binom(n, 2ℓ).  ``residue_lambda_continuation``
returns what the continuation formula actually produces.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial
from typing import Optional, Sequence

import mpmath

from .continuation import (EvalParams, complex_json, classify_singularity, eval_phi2)
from .exact_core import BernoulliConvention, ParityError, bernoulli, rational_str, residue_R, zeta_int
from .series import LAMBDA, MU, SeriesKind, SeriesSpec
from .special_fn import C_kn, euler_gamma, laurent_constants, mangoldt_M, zeta_d

__all__ = [
    "Status",
    "ReverseValue",
    "SingularExpansion",
    "LadderError",
    "SingularCollisionError",
    "IllConditionedFitWarning",
    "DEFAULT_LADDER_START",
    "DEFAULT_LADDER_LEN",
    "default_ladder",
    "B1_CONVENTION",
    "reverse_value_closed_lambda",
    "residue_closed_mu",
    "residue_lambda_continuation",
    "c1_bracket_lambda",
    "fit_singular_expansion",
    "check_c1_closed_form_lambda",
    "resolve_b1_convention",
]

DEFAULT_LADDER_START = Fraction(1, 1000)
DEFAULT_LADDER_LEN = 8

# Settled by comparing both candidates with the fitted c0 at (m, n) = (0, 0);
# see resolve_b1_convention.
B1_CONVENTION = BernoulliConvention.PLUS_HALF


class Status(enum.Enum):
    CONVERGENT = "convergent"
    DIVERGENT = "divergent"


class LadderError(ValueError):
    pass


class SingularCollisionError(ArithmeticError):
    def __init__(self, eps, matches):
        self.eps, self.matches = eps, matches
        names = ", ".join(m["set"] for m in matches)
        super().__init__(f"ladder point eps={mpmath.nstr(eps, 8)} lands on {names}")


class IllConditionedFitWarning(UserWarning):
    pass


def _num_str(x, digits: int) -> str:
    if isinstance(x, Fraction):
        return rational_str(x)
    return mpmath.nstr(x, digits)


@dataclass
class ReverseValue:
    status: Status
    value: object = None
    residue: object = None
    double_pole: object = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        conv = self.status is Status.CONVERGENT
        if conv != (not self.residue and self.double_pole is None):
            raise ValueError("CONVERGENT iff residue is 0 and no double pole")

    def to_json(self, digits: int = 30) -> dict:
        out: dict = {"status": self.status.value}
        if self.value is not None:
            out["value"] = complex_json(self.value, digits)
        if self.residue is not None:
            out["residue"] = _num_str(self.residue, digits)
        if self.double_pole is not None:
            out["double_pole"] = _num_str(self.double_pole, digits)
        out["metadata"] = self.metadata
        return out


@dataclass
class SingularExpansion:
    m: int
    n: int
    series: str
    c2: object
    c1: object
    c0: object
    fit_residual: object
    ladder: list  # (ε, value)
    nuisance: list = field(default_factory=list)  # coefficients of ε, ε², ...
    condition: object = None

    def to_json(self, digits: int = 30) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "series": self.series,
            "c2": complex_json(self.c2, digits),
            "c1": complex_json(self.c1, digits),
            "c0": complex_json(self.c0, digits),
            "fit_residual": mpmath.nstr(self.fit_residual, 6),
            "condition": mpmath.nstr(self.condition, 6) if self.condition is not None else None,
            "nuisance_terms": len(self.nuisance),
            "ladder": [{"eps": mpmath.nstr(e, digits), "value": complex_json(v, digits)}
                       for e, v in self.ladder],
        }


def default_ladder(start=DEFAULT_LADDER_START, length: int = DEFAULT_LADDER_LEN) -> list:
    """ε = start / 2^j, j = 0..length-1, at the current precision."""
    if isinstance(start, (Fraction, int)):
        start = Fraction(start)
        e0 = mpmath.mpf(start.numerator) / start.denominator
    else:
        e0 = mpmath.mpf(start)
    return [e0 / 2 ** j for j in range(length)]


# --- closed forms ------------------------------------------------------------

def _q(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


def reverse_value_closed_lambda(m: int, n: int,
                                conv: BernoulliConvention = B1_CONVENTION) -> ReverseValue:
    """Closed-form reverse value of Φ₂(·,·;1,Λ) at (-m, -n), m + n even.

    The case m = 0, n >= 2 has no reverse value; a DIVERGENT result is
    returned whose residue is the one the continuation produces (+1/2).
    """
    if m < 0 or n < 0:
        raise ValueError("need m, n >= 0")
    if (m + n) % 2:
        raise ParityError(f"m + n must be even, got m={m}, n={n}")
    if m == 0 and n >= 2:
        return ReverseValue(Status.DIVERGENT, residue=residue_lambda_continuation(0, n),
                            metadata={"reason": "excluded case m = 0, n >= 2",
                                      "source": "continuation formula"})
    s = m + n
    kmax = max(2, n + n % 2)
    lc = laurent_constants(kmax)
    B = lambda j: _q(bernoulli(j, conv))
    val = B(s + 2) / ((n + 1) * (s + 2)) + mpmath.log(2 * mpmath.pi) * B(s + 1) / (s + 1)
    for k in range(1, n + 1):
        tail = B(s - k + 1) / (s - k + 1)
        if k % 2:
            # M(-k) = -ζ'(-k)/ζ(-k) with ζ(-k) = -B_{k+1}/(k+1)
            val -= comb(n, k) * (k + 1) / B(k + 1) * zeta_d(-k, 1) * tail
        else:
            val += comb(n, k) * tail * (-lc.a[k] + factorial(k) * lc.b[k])
    val -= (-1) ** m * mpmath.mpf(factorial(m) * factorial(n)) / factorial(s + 1) * mangoldt_M(-s - 1)
    return ReverseValue(Status.CONVERGENT, value=val, residue=Fraction(0),
                        metadata={"bernoulli_B1": str(bernoulli(1, conv))})


def residue_lambda_continuation(m: int, n: int) -> Fraction:
    """Exact 1/ε coefficient of Φ₂(-m, -n+ε; 1, Λ) for m, n >= 0 as produced
    by the continuation: -R(-m,-n) when m + n is odd, otherwise 0 except
    for m = 0, n >= 2 even where the Γ'/Γ term contributes -ζ(0) = 1/2."""
    if m < 0 or n < 0:
        raise ValueError("need m, n >= 0")
    if (m + n) % 2:
        return -residue_R(m, n)
    if m == 0 and n >= 2:
        return -zeta_int(0)
    return Fraction(0)


def residue_closed_mu(m: int, n: int):
    """1/ε coefficient of Φ₂(-m, -n+ε; 1, μ) for m + n odd (D_k = 1/ζ'(-k))."""
    if m < 0 or n < 0:
        raise ValueError("need m, n >= 0")
    if (m + n) % 2 == 0:
        raise ParityError(f"m + n must be odd, got m={m}, n={n}")
    l2 = m + n + 1
    kmax = max(l2, n + n % 2, 2)
    lc = laurent_constants(kmax)
    val = (-1) ** n * lc.D[l2] * mpmath.mpf(factorial(m) * factorial(n)) / factorial(m + n + 1)
    for k in range(2, n + 1, 2):
        val += comb(n, k) * lc.D[k] * _q(zeta_int(k - m - n))
    return val


def c1_bracket_lambda(m: int, n: int):
    """The bracketed 1/ε coefficient for m <= -1 (2ℓ = m+n+1 <= n), with the
    k = 2ℓ term removed from the ζ sum because ζ(1) is a pole there."""
    if m > -1 or n < 0:
        raise ValueError("need m <= -1 and n >= 0")
    if (m + n) % 2 == 0:
        raise ParityError(f"m + n must be odd, got m={m}, n={n}")
    l2 = m + n + 1
    if not 2 <= l2 <= n:
        raise ValueError("need 2 <= 2l <= n")
    lc = laurent_constants(max(2, l2))
    bn = comb(n, l2)
    H = mpmath.fsum(mpmath.mpf(1) / (n - j) for j in range(l2))
    val = bn * ((-lc.a[l2] + factorial(l2) * lc.b[l2]) - H)
    val += mpmath.fsum(comb(n, k) * zeta_d(-m - n + k) for k in range(2, n + 1, 2) if k != l2)
    val += bn * euler_gamma() - C_kn(l2, n) / factorial(l2)
    return val


# --- fitting -------------------------------------------------------------------

def _check_ladder(ladder) -> list:
    eps = [mpmath.mpf(e) for e in ladder]
    if len(eps) < 4:
        raise LadderError("ladder needs at least 4 points")
    if any(not e > 0 for e in eps):
        raise LadderError("ladder points must be positive")
    r = eps[1] / eps[0]
    if not 0 < r < 1:
        raise LadderError("ladder must be strictly decreasing")
    for a, b in zip(eps[1:], eps[2:]):
        if abs(b / a - r) > mpmath.mpf(10) ** (-12) * r:
            raise LadderError("ladder must be geometric")
    return eps


def fit_singular_expansion(m: int, n: int, series: SeriesSpec = LAMBDA,
                           ladder: Optional[Sequence] = None, p: EvalParams | None = None,
                           nuisance: int | None = None) -> SingularExpansion:
    """Fit c2/ε² + c1/ε + c0 (+ nuisance ε^j terms) to Φ₂(-m, -n+ε).

    With the default 8-point ladder three nuisance powers ε, ε², ε³ absorb
    the O(ε) remainder; pass ``nuisance=0`` for the bare 3-parameter model.
    """
    if n < 0:
        raise ValueError("need n >= 0")
    p = p or EvalParams()
    with p.ctx.working():
        eps = _check_ladder(ladder if ladder is not None else default_ladder())
        if nuisance is None:
            nuisance = max(0, min(3, len(eps) - 5))
        ncols = 3 + nuisance
        if len(eps) < ncols:
            raise LadderError(f"{len(eps)} points cannot fit {ncols} parameters")
        table = p.table()
        tol = mpmath.mpf(10) ** (-(p.ctx.target_decimal // 2))
        s1 = mpmath.mpf(-m)
        for e in eps:
            hit = classify_singularity(s1, -n + e, series, tol, table)
            if hit:
                raise SingularCollisionError(e, hit)
        values = [eval_phi2(s1, -n + e, series, p).value for e in eps]

        # columns ε^-2 .. ε^nuisance, each scaled to unit max so the QR is well posed
        powers = list(range(-2, nuisance + 1))
        scale = [max(abs(e ** k) for e in eps) for k in powers]
        A = mpmath.matrix([[e ** k / sc for k, sc in zip(powers, scale)] for e in eps])
        cond = mpmath.cond(A.T * A) if len(eps) >= ncols else mpmath.inf
        if cond > mpmath.mpf(10) ** (p.ctx.target_decimal // 2):
            warnings.warn(f"ill-conditioned fit (cond {mpmath.nstr(cond, 3)})",
                          IllConditionedFitWarning)
        coeffs, resid = [], mpmath.mpf(0)
        for part in (mpmath.re, mpmath.im):
            b = mpmath.matrix([part(v) for v in values])
            x, r = mpmath.qr_solve(A, b)
            coeffs.append([x[i] / scale[i] for i in range(ncols)])
            resid = mpmath.sqrt(resid ** 2 + r ** 2)
        c = [mpmath.mpc(re, im) for re, im in zip(*coeffs)]
        return SingularExpansion(m, n, series.label, c[0], c[1], c[2], resid,
                                 list(zip(eps, values)), c[3:], cond)


def check_c1_closed_form_lambda(m: int, n: int, p: EvalParams | None = None,
                                fit: SingularExpansion | None = None, tol=1e-6) -> dict:
    """Compare the fitted Λ coefficients at m <= -1 with the bracket closed form.

    Both the literal comparison (c1 = bracket, c2 = 2·binom) and the
    sign-reversed one the continuation produces are reported.
    """
    if m > -1:
        raise ValueError("need m <= -1")
    if (m + n) % 2 == 0:
        raise ParityError(f"m + n must be odd, got m={m}, n={n}")
    p = p or EvalParams()
    with p.ctx.working():
        l2 = m + n + 1
        closed = c1_bracket_lambda(m, n)
        c2_closed = 2 * comb(n, l2)
        fit = fit or fit_singular_expansion(m, n, LAMBDA, p=p)
        c1 = mpmath.re(fit.c1)
        c2 = mpmath.re(fit.c2)
        d_lit = abs(c1 - closed)
        d_neg = abs(c1 + closed)
        return {
            "m": m, "n": n, "two_l": l2,
            "closed_c1": closed, "fitted_c1": c1,
            "closed_c2": c2_closed, "fitted_c2": c2,
            "literal_c1_diff": d_lit, "negated_c1_diff": d_neg,
            "literal_c2_diff": abs(c2 - c2_closed), "negated_c2_diff": abs(c2 + c2_closed),
            "matches_literal": bool(d_lit < tol and abs(c2 - c2_closed) < tol),
            "matches_negated": bool(d_neg < tol and abs(c2 + c2_closed) < tol),
        }


def resolve_b1_convention(p: EvalParams | None = None,
                          fit: SingularExpansion | None = None) -> tuple[BernoulliConvention, dict]:
    """Pick the B₁ convention whose closed form at (0, 0) matches the fitted c0."""
    p = p or EvalParams()
    with p.ctx.working():
        fit = fit or fit_singular_expansion(0, 0, LAMBDA, p=p)
        c0 = mpmath.re(fit.c0)
        diffs = {conv: abs(reverse_value_closed_lambda(0, 0, conv).value - c0)
                 for conv in BernoulliConvention}
        best = min(diffs, key=diffs.get)
        return best, {c.name: d for c, d in diffs.items()}
