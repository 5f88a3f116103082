import math
from math import gcd

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ddzeta.arith_fn import (RegionError, build_sieve, convolve_inverse, dirichlet_convolve,
                             direct_phi2)
from ddzeta.series import LAMBDA, MU, SeriesKind, SeriesSpec


@pytest.fixture(scope="module")
def sieve():
    return build_sieve(10 ** 4)


def _factor(n):
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def test_examples(sieve):
    assert sieve.lambda_value(8).prime == 2
    assert sieve.lambda_value(8).value() == mpmath.log(2)
    assert not sieve.lambda_value(6).is_prime_power
    assert sieve.lambda_value(6).value() == 0
    assert [int(sieve.moebius[k]) for k in (1, 6, 12, 30)] == [1, 1, 0, -1]


def test_against_trial_division(sieve):
    for n in range(1, 10 ** 4 + 1):
        f = _factor(n)
        mu = 0 if any(e > 1 for e in f.values()) else (-1) ** len(f)
        lam = next(iter(f)) if len(f) == 1 else None
        assert int(sieve.moebius[n]) == mu
        assert sieve.lambda_value(n).prime == lam


def test_moebius_divisor_sum(sieve):
    N = 10 ** 4
    assert sum(int(sieve.moebius[n]) * (N // n) for n in range(1, N + 1)) == 1
    ones = [1] * N
    assert dirichlet_convolve([int(x) for x in sieve.moebius[1:]], ones) == [1] + [0] * (N - 1)


def test_tables_read_only(sieve):
    with pytest.raises(ValueError):
        sieve.moebius[3] = 5
    assert len(sieve.lambda_values) == sieve.limit


def test_sieve_limits():
    with pytest.raises(ValueError):
        build_sieve(1)
    with pytest.raises(MemoryError):
        build_sieve(1000, memory_cap=100)


def test_convolve_inverse_examples(sieve):
    assert convolve_inverse([1] * 50, sieve) == [1] + [0] * 49
    phi = convolve_inverse(list(range(1, 31)), sieve)
    assert phi == [sum(1 for k in range(1, n + 1) if gcd(k, n) == 1) for n in range(1, 31)]
    lam = [float(sieve.lambda_value(n).value()) for n in range(1, 13)]
    got = convolve_inverse(lam, sieve)[11]
    want = sum(int(sieve.moebius[d]) * lam[12 // d - 1] for d in range(1, 13) if 12 % d == 0)
    assert got == pytest.approx(want)


@settings(max_examples=30)
@given(st.lists(st.integers(-50, 50), min_size=1, max_size=1000))
def test_convolve_inverse_roundtrip(values):
    tilde = convolve_inverse(values)
    assert dirichlet_convolve(tilde, [1] * len(values)) == values


def test_direct_preconditions(sieve):
    with pytest.raises(RegionError):
        direct_phi2(0.5, 1.2, LAMBDA, 1000, sieve)
    with pytest.raises(ValueError):
        direct_phi2(3, 3, LAMBDA, 999, sieve)


def test_direct_monotone_lambda(sieve):
    vals = [direct_phi2(2.5, 2.5, LAMBDA, M, sieve)[0].real for M in (1000, 2000, 5000, 10 ** 4)]
    assert vals == sorted(vals)


def test_direct_mu_uses_moebius(sieve):
    # Σ_m m^{-s1} Σ_n μ(n)(m+n)^{-s2}: compare a small square against a naive loop
    v, tail = direct_phi2(3, 3, MU, 1000, sieve)
    naive = math.fsum(m ** -3 * int(sieve.moebius[n]) * (m + n) ** -3
                      for m in range(1, 1001) for n in range(1, 1001))
    assert v.real == pytest.approx(naive, abs=1e-12)
    assert not tail.is_rigorous and tail.value > 0


def test_direct_tail_estimate_covers_truncation(sieve):
    v1, t1 = direct_phi2(3, 3, LAMBDA, 1000, sieve)
    v2, _ = direct_phi2(3, 3, LAMBDA, 10 ** 4, sieve)
    assert abs(v2 - v1) <= t1.value


def test_direct_plugin_needs_alpha_tilde(sieve):
    spec = SeriesSpec(SeriesKind.PLUGIN, phi_at_neg_k=lambda k: 0, c_k=lambda k: 1,
                      phi=lambda s: mpmath.zeta(s))
    with pytest.raises(ValueError):
        direct_phi2(3, 3, spec, 1000, sieve)
    spec = SeriesSpec(SeriesKind.PLUGIN, phi_at_neg_k=lambda k: 0, c_k=lambda k: 1,
                      phi=lambda s: mpmath.zeta(s), alpha_tilde=lambda n: 1 if n == 1 else 0)
    v, _ = direct_phi2(3, 3, spec, 1000, sieve)
    want = float(mpmath.nsum(lambda m: m ** -3 * (m + 1) ** -3, [1, mpmath.inf]))
    assert v.real == pytest.approx(want, rel=1e-8)
