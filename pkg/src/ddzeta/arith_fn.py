"""Sieved von Mangoldt and Möbius tables, Dirichlet convolution and the
brute-force double sum used as an oracle for the continuation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import mpmath
import numpy as np

from .series import SeriesKind, SeriesSpec

__all__ = [
    "LambdaValue",
    "SieveTable",
    "TailBound",
    "RegionError",
    "build_sieve",
    "convolve_inverse",
    "dirichlet_convolve",
    "direct_phi2",
    "MEMORY_CAP",
]

# entries; int64 + int8 per entry keeps this around 1 GB
MEMORY_CAP = 10 ** 8


class RegionError(ValueError):
    """Point outside the region where the double series converges absolutely."""


@dataclass(frozen=True)
class LambdaValue:
    prime: Optional[int]

    @property
    def is_prime_power(self) -> bool:
        return self.prime is not None

    def value(self):
        """Λ(n) at the current mpmath precision."""
        return mpmath.log(self.prime) if self.prime else mpmath.mpf(0)


@dataclass(frozen=True)
class TailBound:
    value: object
    is_rigorous: bool = False


class SieveTable:
    """Λ and μ for 1..limit.  ``lambda_prime[n]`` is p when n is a power of
    the prime p and 0 otherwise; index 0 is unused."""

    def __init__(self, limit: int, lambda_prime: np.ndarray, moebius: np.ndarray):
        self.limit = limit
        self.lambda_prime = lambda_prime
        self.moebius = moebius
        lambda_prime.setflags(write=False)
        moebius.setflags(write=False)

    def lambda_value(self, n: int) -> LambdaValue:
        p = int(self.lambda_prime[n])
        return LambdaValue(p or None)

    @property
    def lambda_values(self) -> list[LambdaValue]:
        return [self.lambda_value(n) for n in range(1, self.limit + 1)]

    @property
    def moebius_values(self) -> np.ndarray:
        return self.moebius[1:]

    def lambda_float(self) -> np.ndarray:
        """Λ(n) as float64, index 0 unused."""
        out = np.zeros(self.limit + 1)
        mask = self.lambda_prime > 0
        out[mask] = np.log(self.lambda_prime[mask])
        return out


def build_sieve(limit: int, memory_cap: int = MEMORY_CAP) -> SieveTable:
    if limit < 2:
        raise ValueError("limit must be >= 2")
    if limit > memory_cap:
        raise MemoryError(f"sieve limit {limit} exceeds the cap {memory_cap}")
    is_comp = np.zeros(limit + 1, dtype=bool)
    lam = np.zeros(limit + 1, dtype=np.int64)
    mu = np.ones(limit + 1, dtype=np.int8)
    mu[0] = 0
    for p in range(2, limit + 1):
        if is_comp[p]:
            continue
        is_comp[p * p::p] = True
        mu[p::p] *= -1
        if p * p <= limit:
            mu[p * p::p * p] = 0
        q = p
        while q <= limit:
            lam[q] = p
            q *= p
    return SieveTable(limit, lam, mu)


def dirichlet_convolve(a: Sequence, b: Sequence) -> list:
    """(a ∗ b)(n) for n = 1..len; both inputs hold index n at position n-1."""
    N = min(len(a), len(b))
    out = [0 * a[0]] * N
    for d in range(1, N + 1):
        ad = a[d - 1]
        if not ad:
            continue
        for m in range(1, N // d + 1):
            out[d * m - 1] += ad * b[m - 1]
    return out


def convolve_inverse(alpha_values: Sequence, sieve: SieveTable | None = None) -> list:
    """α̃(n) = Σ_{d|n} μ(d) α(n/d) for n = 1..N (position n-1 holds index n)."""
    N = len(alpha_values)
    if N == 0:
        return []
    if sieve is None or sieve.limit < N:
        sieve = build_sieve(max(N, 2))
    mu = [int(x) for x in sieve.moebius[1:N + 1]]
    return dirichlet_convolve(mu, alpha_values)


# --- direct double sum -------------------------------------------------------

def _coefficients(series: SeriesSpec, sieve: SieveTable, M: int) -> np.ndarray:
    if series.kind is SeriesKind.LAMBDA:
        return sieve.lambda_float()[: M + 1]
    if series.kind is SeriesKind.MU:
        return sieve.moebius[: M + 1].astype(float)
    if series.alpha_tilde is None:
        raise ValueError("plug-in series needs alpha_tilde for the direct sum")
    out = np.zeros(M + 1, dtype=complex)
    for n in range(1, M + 1):
        out[n] = complex(series.alpha_tilde(n))
    return out


def _log_tail(M: int, x: float) -> float:
    """∫_M^∞ log(y) y^{-x} dy for x > 1."""
    return M ** (1 - x) * (math.log(M) / (x - 1) + 1 / (x - 1) ** 2)


def direct_phi2(s1, s2, series: SeriesSpec, cutoff: int, sieve: SieveTable | None = None):
    """Σ_{m1, m2 <= cutoff} m1^{-s1} α̃(m2) (m1+m2)^{-s2} with a heuristic tail.

    The square is summed by diagonals n = m1 + m2 through an FFT convolution
    in double precision, which is ample for an oracle aimed at ~1e-8.
    """
    s1, s2 = complex(s1), complex(s2)
    sig1, sig2 = s1.real, s2.real
    sig = sig1 + sig2
    if not (sig2 > 1 and sig > 2):
        raise RegionError(f"need Re s2 > 1 and Re(s1+s2) > 2, got s1={s1}, s2={s2}")
    if cutoff < 1000:
        raise ValueError("cutoff must be >= 1000")
    M = int(cutoff)
    if sieve is None or sieve.limit < M:
        sieve = build_sieve(M)
    coef = _coefficients(series, sieve, M)
    m = np.arange(M + 1, dtype=float)
    logm = np.log(np.maximum(m, 1))
    a = np.exp(-s1 * logm)
    a[0] = 0
    b = coef.astype(complex)
    b[0] = 0
    size = 1 << (2 * M + 1).bit_length()
    conv = np.fft.ifft(np.fft.fft(a, size) * np.fft.fft(b, size))[: 2 * M + 1]
    n = np.arange(2 * M + 1, dtype=float)
    w = np.exp(-s2 * np.log(np.maximum(n, 1)))
    terms = conv[2:] * w[2:]
    value = complex(math.fsum(terms.real), math.fsum(terms.imag))

    # tail: (m1 <= M, m2 > M) and (m1 > M, any m2), each with |α̃(m)| <= log m
    absc = np.abs(coef)
    s1_part = math.fsum(np.exp(-sig1 * logm[1:]))
    part1 = s1_part * _log_tail(M, sig2)
    theta = min(1.0, max(0.0, (sig2 - sig1) / (2 * sig2)))
    x2 = (1 - theta) * sig2
    e1 = sig1 + theta * sig2
    alpha_sum = math.fsum(absc[1:] * np.exp(-x2 * logm[1:])) + _log_tail(M, x2)
    part2 = M ** (1 - e1) / (e1 - 1) * alpha_sum
    return value, TailBound(part1 + part2, False)
