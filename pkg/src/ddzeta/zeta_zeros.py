"""Tables of nontrivial zeta zeros: loading, validation and tail bounds.

Only positive ordinates γ are stored; sums over zeros pair each ρ = 1/2 + iγ
with its conjugate at evaluation time.
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import mpmath

from .special_fn import PrecisionContext, zeta_d

__all__ = [
    "ZeroTable",
    "ZeroSumPolicy",
    "ZeroTableError",
    "ZeroValidationError",
    "PrecisionWarning",
    "load_zeros",
    "load_default_zeros",
    "default_zeros_path",
    "parse_zeros",
    "validate_zeros",
    "zero_sum_tail_bound",
]

FIRST_ZERO = 14.134725141734693


class ZeroTableError(ValueError):
    """Malformed or missing zero table."""


class ZeroValidationError(ValueError):
    def __init__(self, report: dict):
        self.report = report
        super().__init__(f"zeta residual too large at zero indices {report['offending']}")


class PrecisionWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ZeroTable:
    gammas: tuple
    source_digits: int
    source: str = "<memory>"
    stored_digits: int | None = None  # working dps the ordinates were rounded to

    @property
    def count(self) -> int:
        return len(self.gammas)

    @property
    def effective_digits(self) -> int:
        if self.stored_digits is None:
            return self.source_digits
        return min(self.source_digits, self.stored_digits)

    def __post_init__(self):
        g = self.gammas
        if not g:
            raise ZeroTableError("zero table is empty")
        if abs(float(g[0]) - FIRST_ZERO) > 1e-3:
            raise ZeroTableError(f"first ordinate {mpmath.nstr(g[0], 15)} is not the first zeta zero")
        for i in range(1, len(g)):
            if not g[i] > g[i - 1]:
                raise ZeroTableError(f"ordering violation at entry {i + 1}: "
                                     f"{mpmath.nstr(g[i], 20)} <= {mpmath.nstr(g[i - 1], 20)}")

    def serialize(self, digits: int | None = None) -> str:
        digits = digits or self.source_digits
        lines = [f"# source: {self.source}", f"# digits: {self.source_digits}"]
        # fixed-point with `digits` decimals keeps the text stable across runs
        lines += [mpmath.nstr(g, digits + len(str(int(g))), strip_zeros=False) for g in self.gammas]
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class ZeroSumPolicy:
    max_zeros: int = 100
    tail_tolerance: object = None  # None: 10^-(working digits)

    def __post_init__(self):
        if self.max_zeros < 0:
            raise ValueError("max_zeros must be >= 0")
        if self.tail_tolerance is not None and not self.tail_tolerance > 0:
            raise ValueError("tail_tolerance must be positive")

    def check(self, table: ZeroTable) -> None:
        if self.max_zeros > table.count:
            raise ValueError(f"max_zeros={self.max_zeros} exceeds the {table.count} tabulated zeros")

    def tolerance(self):
        if self.tail_tolerance is None:
            return mpmath.mpf(10) ** (-mpmath.mp.dps)
        return mpmath.mpf(self.tail_tolerance)


def _decimals(text: str) -> int:
    mant = text.lower().split("e")[0]
    return len(mant.split(".")[1]) if "." in mant else 0


def parse_zeros(text: str, ctx: PrecisionContext | None = None, source: str = "<memory>") -> ZeroTable:
    ctx = ctx or PrecisionContext()
    gammas, digits = [], None
    with ctx.working():
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                g = mpmath.mpf(line)
            except (ValueError, TypeError):
                raise ZeroTableError(f"{source}:{lineno}: cannot parse {line!r}") from None
            if not mpmath.isfinite(g) or g <= 0:
                raise ZeroTableError(f"{source}:{lineno}: ordinate must be positive, got {line!r}")
            d = _decimals(line)
            digits = d if digits is None else min(digits, d)
            gammas.append(g)
        dps = mpmath.mp.dps
    if not gammas:
        raise ZeroTableError(f"{source}: no ordinates found")
    if digits < ctx.target_decimal:
        warnings.warn(f"zero table {source} has {digits} digits, below the requested "
                      f"{ctx.target_decimal}", PrecisionWarning, stacklevel=2)
    return ZeroTable(tuple(gammas), digits, source, dps)


def load_zeros(path, ctx: PrecisionContext | None = None) -> ZeroTable:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ZeroTableError(f"cannot read zero table {path}: {exc.strerror}") from exc
    return parse_zeros(text, ctx, str(path))


def default_zeros_path() -> Path:
    env = os.environ.get("DDZETA_ZEROS")
    if env:
        return Path(env)
    return Path(str(resources.files("ddzeta") / "data" / "zeta_zeros_100.txt"))


_default_cache: dict = {}


def load_default_zeros(ctx: PrecisionContext | None = None) -> ZeroTable:
    ctx = ctx or PrecisionContext()
    path = default_zeros_path()
    key = (str(path), ctx.bits)
    if key not in _default_cache:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", PrecisionWarning)
            _default_cache[key] = load_zeros(path, ctx)
    return _default_cache[key]


def validate_zeros(table: ZeroTable, k: int, raise_on_failure: bool = True) -> dict:
    """Check |ζ(1/2 + iγ)| < 10^(5 - d) for the first k ordinates, where d is
    the smaller of the table's printed digits and the precision it was read at."""
    if k < 0 or k > table.count:
        raise ValueError(f"k={k} outside 0..{table.count}")
    report = {"checked": k, "max_residual": "0", "threshold": None, "offending": []}
    if k == 0:
        return report
    d = table.effective_digits
    threshold = mpmath.mpf(10) ** (5 - d)
    worst = mpmath.mpf(0)
    with mpmath.workprec(int((d + 15) * 3.33)):
        for i, g in enumerate(table.gammas[:k]):
            r = abs(zeta_d(mpmath.mpc(0.5, g), 0))
            worst = max(worst, r)
            if r >= threshold:
                report["offending"].append(i + 1)
    report["max_residual"] = mpmath.nstr(worst, 6)
    report["threshold"] = mpmath.nstr(threshold, 6)
    if report["offending"] and raise_on_failure:
        raise ZeroValidationError(report)
    return report


# --- tail bound --------------------------------------------------------------

def _gamma_bound(x, y):
    """Heuristic |Γ(x+iy)| bound from Stirling, meant for |y| >= 10."""
    y = abs(y)
    base = y if x < 0.5 else y + abs(x) + 1
    return 2 * mpmath.sqrt(2 * mpmath.pi) * base ** (x - 0.5) * mpmath.exp(-mpmath.pi * y / 2)


def _zeta_growth(sigma, tau):
    """Convexity-type heuristic bound for |ζ(σ+iτ)|."""
    t = abs(tau) + 3
    if sigma >= 1:
        mu = 0
    elif sigma >= 0:
        mu = (1 - sigma) / 2
    else:
        mu = mpmath.mpf(0.5) - sigma
    return 3 * mpmath.log(t) * t ** mu


def zero_sum_tail_bound(s2, last_gamma, s_sum=None, zeta_prime_weight: bool = False):
    """Heuristic bound on Σ_{γ > last_gamma} over ρ and ρ̄ of
    |Γ(s2 - ρ) Γ(ρ) ζ(s_sum - ρ)| (times 1/|ζ'(ρ)| when requested).

    The ζ factor is dropped when ``s_sum`` is None.  Not rigorous: it rests on
    Stirling, a convexity estimate for ζ, zero density log(t)/2π + 1 per unit
    height and, for the ζ' weight, |1/ζ'(ρ)| <= t^(1/2).
    """
    s2 = mpmath.mpmathify(s2)
    G = mpmath.mpf(last_gamma)
    if not G > abs(mpmath.im(s2)) + 10:
        raise ValueError(f"last_gamma={mpmath.nstr(G, 8)} must exceed |Im s2| + 10")
    if s_sum is not None:
        s_sum = mpmath.mpmathify(s_sum)
        if not G > abs(mpmath.im(s_sum)) + 10:
            raise ValueError("last_gamma must exceed |Im(s1+s2)| + 10")
    x1, y2 = mpmath.re(s2) - 0.5, mpmath.im(s2)
    with mpmath.workdps(30):
        total = mpmath.mpf(0)
        t = G
        for _ in range(100000):
            f = mpmath.mpf(0)
            for sgn in (1, -1):
                term = _gamma_bound(x1, y2 - sgn * t) * _gamma_bound(0.5, t)
                if s_sum is not None:
                    term *= _zeta_growth(mpmath.re(s_sum) - 0.5, mpmath.im(s_sum) - sgn * t)
                if zeta_prime_weight:
                    term *= mpmath.sqrt(t)
                f += term
            dens = mpmath.log(t) / (2 * mpmath.pi) + 1
            total += dens * f
            if dens * f < total * mpmath.mpf(10) ** -20:
                break
            t += 1
    return total
