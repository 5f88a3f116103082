from fractions import Fraction
from math import comb, factorial

import pytest
from hypothesis import given, settings, strategies as st

from ddzeta.exact_core import (BernoulliConvention, GammaLinear, ParityError, bernoulli,
                               parse_rational, rational_str, reciprocity_check, residue_R,
                               residue_R_bernoulli_form, run_suite, saalschutz_check, zeta_int)

MINUS, PLUS = BernoulliConvention.MINUS_HALF, BernoulliConvention.PLUS_HALF


def test_bernoulli_examples():
    assert bernoulli(0, MINUS) == 1
    assert bernoulli(2, MINUS) == Fraction(1, 6)
    assert bernoulli(1, PLUS) == Fraction(1, 2)
    assert bernoulli(1, MINUS) == Fraction(-1, 2)
    assert bernoulli(3, MINUS) == 0
    assert bernoulli(12) == Fraction(-691, 2730)


def test_bernoulli_recurrence_oracle():
    # independent: Σ_{j<=n} C(n+1, j) B_j = 0 for n >= 1
    for n in range(1, 60):
        assert sum(comb(n + 1, j) * bernoulli(j) for j in range(n + 1)) == 0


@given(st.integers(0, 120))
def test_conventions_differ_only_at_one(n):
    a, b = bernoulli(n, MINUS), bernoulli(n, PLUS)
    assert (a == b) == (n != 1)


@given(st.integers(1, 100))
def test_odd_bernoulli_vanish(k):
    assert bernoulli(2 * k + 1) == 0
    assert bernoulli(2 * k + 1, PLUS) == 0


def test_zeta_int_examples():
    assert zeta_int(0) == Fraction(-1, 2)
    assert zeta_int(-1) == Fraction(-1, 12)
    assert zeta_int(-3) == Fraction(1, 120)
    assert zeta_int(-4) == 0
    with pytest.raises(ValueError):
        zeta_int(1)


@given(st.integers(1, 100))
def test_trivial_zeros(k):
    assert zeta_int(-2 * k) == 0


def test_residue_examples():
    assert residue_R(1, 0) == Fraction(1, 2)
    assert residue_R(1, 2) == 0
    assert residue_R(2, 1) == Fraction(-1, 12)
    assert residue_R(0, 1) == Fraction(-1, 2)


def test_residue_preconditions():
    with pytest.raises(ParityError):
        residue_R(1, 1)
    with pytest.raises(ValueError):
        residue_R(-1, 2)


@settings(max_examples=150)
@given(st.integers(0, 50), st.integers(0, 50))
def test_two_residue_forms_agree(m, n):
    if (m + n) % 2 == 0:
        n += 1
    assert residue_R(m, n) == residue_R_bernoulli_form(m, n)


@settings(max_examples=100)
@given(st.integers(0, 40), st.integers(0, 40))
def test_saalschutz_property(p, q):
    t1, t2, rhs = saalschutz_check(p, q)
    assert t1 + t2 == rhs == Fraction(factorial(p) * factorial(q), factorial(p + q + 1))


def test_saalschutz_examples():
    assert saalschutz_check(0, 0) == (Fraction(1, 2), Fraction(1, 2), Fraction(1))
    t1, t2, rhs = saalschutz_check(2, 1)
    assert t1 + t2 == rhs == Fraction(1, 12)


@settings(max_examples=100)
@given(st.integers(1, 50), st.integers(1, 50))
def test_reciprocity_property(m, n):
    if (m + n) % 2 == 0:
        n = n + 1 if n < 50 else n - 1
    assert reciprocity_check(m, n)[2] == 0


def test_reciprocity_examples():
    assert reciprocity_check(1, 2) == (Fraction(1, 12), Fraction(1, 12), 0)
    assert reciprocity_check(3, 4)[2] == 0
    with pytest.raises(ParityError):
        reciprocity_check(2, 2)


@given(st.integers(1, 50))
def test_thm41_cor44_families(N):
    assert residue_R(1, 2 * N) == 0
    assert residue_R(2 * N, 1) == Fraction(-1, (2 * N + 1) * (2 * N + 2))


@given(st.integers(0, 49))
def test_prop45_family(j):
    assert residue_R(0, 2 * j + 1) == Fraction(-1, 2)


def test_gamma_linear():
    a = GammaLinear(Fraction(1, 2), Fraction(-1))
    b = GammaLinear(Fraction(1, 3), Fraction(2))
    assert a + b == GammaLinear(Fraction(5, 6), Fraction(1))
    assert a - b == GammaLinear(Fraction(1, 6), Fraction(-3))
    assert a.scale(Fraction(2, 3)) == GammaLinear(Fraction(1, 3), Fraction(-2, 3))


@given(st.fractions())
def test_rational_roundtrip(x):
    assert parse_rational(rational_str(x)) == x


def test_rational_str_format():
    assert rational_str(Fraction(-2, 24)) == "-1/12"
    assert rational_str(Fraction(0)) == "0"


def test_run_suite():
    assert run_suite("all", 0) == []
    rows = run_suite("reciprocity", 3)
    assert [r["case"] for r in rows][:2] == ["reciprocity:1,2", "reciprocity:2,1"]
    assert all(r["status"] == "pass" for r in run_suite("all", 12))
    with pytest.raises(KeyError):
        run_suite("nope", 3)
