import pytest
from hypothesis import given, strategies as st
from mpmath import mp

from qaw.errors import InvalidPrecisionError, SingularPointError
from qaw.numctx import GUARD_DIGITS, PrecisionContext, make_context, resolve, working, x_from_z, zpoint_from_x


@pytest.mark.parametrize("digits", [-1, 0, 15, 15.5, "50"])
def test_rejects_low_or_non_integer_digits(digits):
    with pytest.raises(InvalidPrecisionError):
        make_context(digits)


def test_default_tolerances():
    ctx = make_context(40)
    assert ctx.series_tol == mp.mpf(10) ** -40
    assert ctx.quad_tol == mp.mpf(10) ** -20
    assert ctx.work_dps == 40 + GUARD_DIGITS


def test_explicit_tolerance_out_of_range():
    with pytest.raises(InvalidPrecisionError):
        PrecisionContext(20, series_tol=mp.mpf(2))


def test_activate_and_working_restore_precision():
    before = mp.dps
    with make_context(60).activate():
        assert mp.dps == 75
    assert mp.dps == before
    with working(make_context(20)):
        assert mp.dps >= 35
    assert mp.dps == before


def test_resolve_follows_ambient_precision():
    with mp.workdps(80):
        assert resolve(None).digits == 80 - GUARD_DIGITS
    ctx = make_context(30)
    assert resolve(ctx) is ctx


def test_x_from_z_singular():
    with pytest.raises(SingularPointError):
        x_from_z(0)


def test_degenerate_points():
    assert zpoint_from_x(mp.mpc(0, 1)).degenerate
    assert not zpoint_from_x(mp.mpf("0.3")).degenerate


def test_real_x_positive_branch():
    zp = zpoint_from_x(mp.mpf("0.75"))
    assert zp.z_pos == 2
    assert zp.z_small == mp.mpf("-0.5")


finite = st.floats(-50, 50, allow_nan=False)


@given(finite, finite)
def test_roots_multiply_to_minus_one_and_map_back(re, im):
    with mp.workdps(40):
        x = mp.mpc(re, im)
        zp = zpoint_from_x(x)
        assert abs(zp.z_small * zp.z_big + 1) < mp.mpf(10) ** -30 * max(1, abs(x) ** 2)
        assert abs(zp.z_small) <= abs(zp.z_big)
        for z in (zp.z_small, zp.z_big):
            assert abs(x_from_z(z) - x) < mp.mpf(10) ** -30 * max(1, abs(x))
