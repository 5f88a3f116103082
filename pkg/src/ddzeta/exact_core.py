"""Exact rational arithmetic for Bernoulli numbers, zeta at non-positive
integers and the residue function R(-m, -n).

All values are :class:`fractions.Fraction`; nothing in this module ever
touches floating point.
"""

from __future__ import annotations

import enum
import threading
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

__all__ = [
    "BernoulliConvention",
    "GammaLinear",
    "ParityError",
    "bernoulli",
    "zeta_int",
    "residue_R",
    "residue_R_bernoulli_form",
    "saalschutz_check",
    "reciprocity_check",
    "rational_str",
    "parse_rational",
    "SUITES",
    "run_suite",
]


class ParityError(ValueError):
    """Raised when (m, n) violate a parity or range precondition."""


class BernoulliConvention(enum.Enum):
    MINUS_HALF = "minus_half"  # B_1 = -1/2, generating function t/(e^t - 1)
    PLUS_HALF = "plus_half"  # B_1 = +1/2, generating function t e^t/(e^t - 1)


@dataclass(frozen=True)
class GammaLinear:
    """``const_part + gamma_coeff * γ`` with rational coefficients."""

    const_part: Fraction
    gamma_coeff: Fraction

    def __add__(self, other: GammaLinear) -> GammaLinear:
        return GammaLinear(self.const_part + other.const_part,
                           self.gamma_coeff + other.gamma_coeff)

    def __sub__(self, other: GammaLinear) -> GammaLinear:
        return GammaLinear(self.const_part - other.const_part,
                           self.gamma_coeff - other.gamma_coeff)

    def scale(self, r) -> GammaLinear:
        r = Fraction(r)
        return GammaLinear(self.const_part * r, self.gamma_coeff * r)

    def evaluate(self, euler_gamma):
        """Realize numerically; ``euler_gamma`` carries the target precision."""
        c, g = self.const_part, self.gamma_coeff
        return (euler_gamma * g.numerator) / g.denominator + \
            type(euler_gamma)(c.numerator) / c.denominator


# Memo table for B_n under the B_1 = -1/2 convention.  Appends only happen
# under the lock; readers see a list that only ever grows.
_bern: list[Fraction] = [Fraction(1)]
_bern_lock = threading.Lock()


def _extend_bernoulli(n: int) -> None:
    with _bern_lock:
        for k in range(len(_bern), n + 1):
            if k >= 3 and k % 2:
                _bern.append(Fraction(0))
                continue
            # sum_{j=0}^{k} C(k+1, j) B_j = 0
            s = sum(comb(k + 1, j) * _bern[j] for j in range(k) if _bern[j])
            _bern.append(-s / (k + 1))


def bernoulli(n: int, conv: BernoulliConvention = BernoulliConvention.MINUS_HALF) -> Fraction:
    if n < 0:
        raise ValueError(f"Bernoulli index must be >= 0, got {n}")
    if n >= len(_bern):
        _extend_bernoulli(n)
    b = _bern[n]
    if n == 1 and conv is BernoulliConvention.PLUS_HALF:
        return -b
    return b


def zeta_int(j: int) -> Fraction:
    """ζ(j) for an integer j <= 0."""
    if j > 0:
        raise ValueError(f"zeta_int needs j <= 0, got {j}")
    if j == 0:
        return Fraction(-1, 2)
    r = 1 - j
    if r % 2:
        return Fraction(0)
    # zeta(1 - r) = -B_r / r for even r >= 2
    return -bernoulli(r) / r


def _check_mn(m: int, n: int) -> None:
    if m < 0 or n < 0:
        raise ParityError(f"residue_R needs m, n >= 0, got ({m}, {n})")
    if (m + n) % 2 == 0:
        raise ParityError(f"residue_R needs m + n odd, got ({m}, {n})")


def _boundary(m: int, n: int) -> Fraction:
    return Fraction((-1) ** n * factorial(m) * factorial(n), factorial(m + n + 1))


def residue_R_bernoulli_form(m: int, n: int) -> Fraction:
    """R(-m,-n) written through Bernoulli numbers instead of zeta values."""
    _check_mn(m, n)
    total = _boundary(m, n)
    for j in range(1, n // 2 + 1):
        r = m + n + 1 - 2 * j
        total -= comb(n, 2 * j) * bernoulli(r) / r
    return total


def residue_R(m: int, n: int) -> Fraction:
    """Residue R(-m, -n) for m, n >= 0 with m + n odd.

    Both the zeta-value form and the Bernoulli form are computed; they must
    agree exactly.
    """
    _check_mn(m, n)
    total = _boundary(m, n)
    for k in range(2, n + 1, 2):
        total += comb(n, k) * zeta_int(k - m - n)
    other = residue_R_bernoulli_form(m, n)
    if total != other:
        raise ArithmeticError(f"R(-{m},-{n}): zeta form {total} != Bernoulli form {other}")
    return total


def saalschutz_check(p: int, q: int) -> tuple[Fraction, Fraction, Fraction]:
    """Two left-hand sums and the right-hand side of Saalschütz's reciprocity
    for Bernoulli numbers (B_1 = -1/2)."""
    if p < 0 or q < 0:
        raise ValueError("p, q must be >= 0")
    t1 = (-1) ** (p + 1) * sum(
        (comb(q, l) * bernoulli(p + 1 + l) / (p + 1 + l) for l in range(q + 1)), Fraction(0))
    t2 = (-1) ** (q + 1) * sum(
        (comb(p, l) * bernoulli(q + 1 + l) / (q + 1 + l) for l in range(p + 1)), Fraction(0))
    rhs = Fraction(factorial(p) * factorial(q), factorial(p + q + 1))
    return t1, t2, rhs


def reciprocity_check(m: int, n: int) -> tuple[Fraction, Fraction, Fraction]:
    """(lhs, rhs, lhs - rhs) for (-1)^n R(-m,-n) + (-1)^m R(-n,-m) = m!n!/(m+n+1)!."""
    if m < 1 or n < 1:
        raise ParityError(f"reciprocity needs m, n >= 1, got ({m}, {n})")
    _check_mn(m, n)
    lhs = (-1) ** n * residue_R(m, n) + (-1) ** m * residue_R(n, m)
    rhs = Fraction(factorial(m) * factorial(n), factorial(m + n + 1))
    return lhs, rhs, lhs - rhs


def rational_str(x: Fraction) -> str:
    return str(Fraction(x))


def parse_rational(text: str) -> Fraction:
    return Fraction(text.strip())


# --- verification suites -------------------------------------------------

def _case(case_id, inputs, expected, actual):
    return {
        "case": case_id,
        "inputs": inputs,
        "expected": rational_str(expected),
        "actual": rational_str(actual),
        "status": "pass" if expected == actual else "FAIL",
    }


def _suite_saalschutz(M):
    for p in range(M + 1):
        for q in range(M + 1):
            t1, t2, rhs = saalschutz_check(p, q)
            yield _case(f"saalschutz:{p},{q}", f"p={p};q={q}", rhs, t1 + t2)


def _suite_reciprocity(M):
    for m in range(1, M + 1):
        for n in range(1, M + 1):
            if (m + n) % 2:
                lhs, rhs, _ = reciprocity_check(m, n)
                yield _case(f"reciprocity:{m},{n}", f"m={m};n={n}", rhs, lhs)


def _suite_thm41(M):
    for N in range(M + 1):
        expected = Fraction(1, 2) if N == 0 else Fraction(0)
        yield _case(f"thm41:{N}", f"m=1;n={2 * N}", expected, residue_R(1, 2 * N))


def _suite_cor44(M):
    for N in range(1, M + 1):
        yield _case(f"cor44:{N}", f"m={2 * N};n=1",
                    Fraction(-1, (2 * N + 1) * (2 * N + 2)), residue_R(2 * N, 1))


def _suite_prop45(M):
    # every odd n = 2N - 1, N = 1..M
    for N in range(1, M + 1):
        n = 2 * N - 1
        yield _case(f"prop45:{n}", f"m=0;n={n}", Fraction(-1, 2), residue_R(0, n))


SUITES = {
    "saalschutz": _suite_saalschutz,
    "reciprocity": _suite_reciprocity,
    "thm41": _suite_thm41,
    "cor44": _suite_cor44,
    "prop45": _suite_prop45,
}


def run_suite(name: str, max_index: int) -> list[dict]:
    """Run one named identity suite (or ``"all"``) up to ``max_index``.

    ``max_index == 0`` yields an empty suite.
    """
    if max_index < 0:
        raise ValueError("max_index must be >= 0")
    if max_index == 0:
        return []
    names = list(SUITES) if name == "all" else [name]
    out = []
    for nm in names:
        if nm not in SUITES:
            raise KeyError(f"unknown suite {nm!r}")
        out.extend(SUITES[nm](max_index))
    return out
