import warnings

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from ddzeta.special_fn import PrecisionContext
from ddzeta.zeta_zeros import (PrecisionWarning, ZeroSumPolicy, ZeroTable, ZeroTableError,
                               ZeroValidationError, load_default_zeros, load_zeros, parse_zeros,
                               validate_zeros, zero_sum_tail_bound)

CTX = PrecisionContext(target_decimal=40)


@pytest.fixture(scope="module")
def table():
    return load_default_zeros(PrecisionContext())


def test_bundled_table(table):
    assert table.count == 100
    assert table.source_digits >= 30
    with mpmath.workdps(60):
        first = mpmath.mpf("14.1347251417346937904572519835624702707842571156992")
        assert abs(table.gammas[0] - first) < 1e-45
    with mpmath.workdps(40):
        for n in (1, 17, 100):
            assert abs(table.gammas[n - 1] - mpmath.zetazero(n).imag) < mpmath.mpf(10) ** -35


def test_parse_fidelity():
    text = "# comment\n14.134725141734693790457251983562470270784257115699\n21.022039638771554992628479593896902777334340524903\n"
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PrecisionWarning)
        t = parse_zeros(text, CTX)
    assert t.count == 2
    with CTX.working():
        assert abs(t.gammas[0] - mpmath.mpf("14.134725141734693790457251983562470270784257115699")) < 1e-20


@pytest.mark.filterwarnings("ignore::ddzeta.zeta_zeros.PrecisionWarning")
def test_parse_errors():
    with pytest.raises(ZeroTableError, match="no ordinates"):
        parse_zeros("# nothing\n\n", CTX)
    with pytest.raises(ZeroTableError, match="ordering"):
        parse_zeros("14.134725141734693790\n25.0108575801456887632\n21.0220396387715549926\n", CTX)
    with pytest.raises(ZeroTableError, match=":3:"):
        parse_zeros("# c\n14.134725141734693790\nabc\n", CTX)
    with pytest.raises(ZeroTableError):
        parse_zeros("-3\n", CTX)
    with pytest.raises(ZeroTableError, match="first"):
        parse_zeros("15.5\n", CTX)


def test_precision_warning():
    with pytest.warns(PrecisionWarning):
        parse_zeros("14.1347251417\n", CTX)


def test_load_missing(tmp_path):
    with pytest.raises(ZeroTableError):
        load_zeros(tmp_path / "missing.txt", CTX)


def test_serialize_roundtrip(table):
    ctx = PrecisionContext(target_decimal=80)
    text = table.serialize()
    again = parse_zeros(text, ctx, "roundtrip")
    with ctx.working():
        assert all(abs(a - b) < mpmath.mpf(10) ** -95 for a, b in zip(table.gammas, again.gammas))
    assert again.source_digits == table.source_digits


def test_validate(table):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PrecisionWarning)
        lines = [mpmath.nstr(g, 32, strip_zeros=False) for g in table.gammas[:20]]
        t30 = parse_zeros("\n".join(lines), CTX)
    rep = validate_zeros(t30, 20)
    assert rep["checked"] == 20 and not rep["offending"]
    assert mpmath.mpf(rep["max_residual"]) < 1e-25
    assert validate_zeros(t30, 0)["checked"] == 0
    bad = ZeroTable(t30.gammas[:4] + (t30.gammas[4] + mpmath.mpf("1e-3"),) + t30.gammas[5:],
                    t30.source_digits)
    with pytest.raises(ZeroValidationError) as exc:
        validate_zeros(bad, 10)
    assert exc.value.report["offending"] == [5]
    with pytest.raises(ValueError):
        validate_zeros(t30, 21)


def test_tail_bound_example(table):
    assert zero_sum_tail_bound(mpmath.mpf(-0.5), table.gammas[-1]) < mpmath.mpf(10) ** -100
    with pytest.raises(ValueError):
        zero_sum_tail_bound(mpmath.mpc(0, 230), table.gammas[-1])


@settings(max_examples=20, deadline=None)
@given(st.floats(-3, 3), st.floats(30, 200), st.floats(0.5, 30))
def test_tail_bound_monotone(x, g, dg):
    s2 = mpmath.mpc(x, 1)
    assert zero_sum_tail_bound(s2, g + dg) <= zero_sum_tail_bound(s2, g)


def test_policy():
    with pytest.raises(ValueError):
        ZeroSumPolicy(max_zeros=-1)
    with pytest.raises(ValueError):
        ZeroSumPolicy(tail_tolerance=0)
    t = ZeroTable((mpmath.mpf(FIRST),), 10)
    with pytest.raises(ValueError):
        ZeroSumPolicy(max_zeros=2).check(t)


FIRST = "14.1347251417"
