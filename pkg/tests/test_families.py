import itertools

import pytest
from hypothesis import given, strategies as st
from mpmath import mp

from qaw import families as fam
from qaw.errors import InvalidArgumentError, InvalidParametersError, InvalidBaseError, UnsupportedParametersError

HALF = mp.mpf(1) / 2
PT = ("0.3", "0.2", "0.1", "0.4")
VT = (1, 2, 3)


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


@pytest.fixture
def P(ctx50):
    return fam.FiniteFamilyParams(HALF, PT)


@pytest.fixture
def V(ctx50):
    return fam.InfiniteFamilyParams(HALF, VT)


# frozen values at digits = 40, q = 1/2
@pytest.mark.parametrize(
    "kind, n, x, expected",
    [
        ("p", 3, "0.25", ("3333.056215056666621455439814814814814815", "0")),
        ("p", 2, ("0.3", "0.5"), ("527.5401215277777777777777777777777777778", "-577.9015625")),
        ("V", 4, "0.25", ("17.80613914305294542021463974476791162677", "0")),
        ("Vtilde", 3, "0.25", ("0.9589831186898097314693997549761357493581", "0")),
    ],
)
def test_frozen_values(P, V, kind, n, x, expected):
    x = mp.mpc(*x) if isinstance(x, tuple) else mp.mpf(x)
    expected = mp.mpc(*expected)
    if kind == "p":
        vals = [fam.pn_series(x, P, n), fam.pn_recurrence(x, P, n)]
    elif kind == "V":
        vals = [fam.vn_series(x, V, n), fam.vn_recurrence(x, V, n)]
    else:
        vals = [fam.vn_tilde(x, V, n)]
    for v in vals:
        assert rel(v, expected) < mp.mpf(10) ** -38


def test_degree_zero_is_one(P, V):
    assert fam.pn_series(mp.mpf("0.7"), P, 0) == 1
    assert fam.vn_recurrence(mp.mpf("0.7"), V, 0) == 1


def test_parameter_validation(ctx50):
    with pytest.raises(InvalidParametersError):
        fam.FiniteFamilyParams(HALF, (1, 2, 3))
    with pytest.raises(InvalidParametersError):
        fam.InfiniteFamilyParams(HALF, (1, 0, 3))
    with pytest.raises(InvalidBaseError):
        fam.InfiniteFamilyParams(2, VT)
    with pytest.raises(InvalidArgumentError):
        fam.pn_series(0, fam.FiniteFamilyParams(HALF, PT), -1)


@pytest.mark.parametrize(
    "t, expected",
    [
        (PT, 2),
        (("0.5", "0.5", "0.5", "0.5"), 0),
        (("0.01", "0.01", "0.01", "0.01"), 11),
        (("2", "2", "2", "2"), -1),
    ],
)
def test_n_orth(ctx50, t, expected):
    assert fam.FiniteFamilyParams(HALF, t).n_orth == expected


def test_conjugate_pair_flag(ctx50):
    a, b = mp.mpc("0.3", "0.1"), mp.mpc("0.2", "0.2")
    assert fam.FiniteFamilyParams(HALF, (a, mp.conj(a), b, mp.conj(b))).is_conjugate_pair
    assert not fam.FiniteFamilyParams(HALF, PT).is_conjugate_pair


def test_leading_coefficient_matches_monic_part(V):
    coeffs = fam.infinite_recurrence_coeffs(V, 3)
    lead = fam.leading_coefficient(coeffs, 3)
    # cubic leading term dominates at large x
    x = mp.mpf(10) ** 20
    assert rel(fam.vn_recurrence(x, V, 3) / x ** 3, lead) < mp.mpf(10) ** -15


def test_vn_is_limit_of_pn(ctx50):
    out = fam.vn_as_limit_of_pn(mp.mpf("0.4"), HALF, 1, 2, 3, 3, [mp.mpf(10) ** -k for k in (4, 8, 12, 16)])
    errs = out["errors"]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] / abs(out["target"]) < mp.mpf(10) ** -12


def test_connection_identity_and_shift(ctx50):
    P = fam.FiniteFamilyParams(HALF, PT)
    coeffs = fam.connection_p(P, P, 3)
    assert all(abs(c - (k == 3)) < mp.mpf(10) ** -45 for k, c in enumerate(coeffs))
    with pytest.raises(InvalidParametersError):
        fam.connection_p(P, fam.FiniteFamilyParams(mp.mpf("0.3"), PT), 2)


@pytest.mark.parametrize("family, t", [("p", PT), ("V", ("0.5", "0.3", "0.2"))])
@pytest.mark.parametrize("x", ["-0.8", "0.3", "1"])
def test_generating_function_taylor_coefficients(ctx50, family, t, x):
    params = fam.FiniteFamilyParams(HALF, t) if family == "p" else fam.InfiniteFamilyParams(HALF, t)
    left, right = fam.genfun_sides(family, params, mp.mpf(x), 8)
    for a, b in zip(left, right):
        assert abs(a - b) <= mp.mpf(10) ** -40 * max(1, abs(b))


def test_generating_function_residual_shrinks_with_order(ctx50):
    V = fam.InfiniteFamilyParams(HALF, ("0.5", "0.3", "0.2"))
    r = [fam.genfun_residual("V", V, mp.mpf("0.3"), mp.mpf("0.05"), K) for K in (4, 8, 12)]
    assert r[0] > r[1] > r[2]
    with pytest.raises(InvalidArgumentError):
        fam.genfun_closed_form("W", V, 0, 0.1)


def test_zeros_frozen(ctx50):
    V = fam.InfiniteFamilyParams(HALF, (1, 1, 1))
    table = fam.vn_zero_table(V, 3)
    assert table[0] == [7] or abs(table[0][0] - 7) < mp.mpf(10) ** -40
    expected = [
        mp.mpf("4.956322133738537100138963517960480700121"),
        mp.mpf("21.25010089183092710806326019211814049583"),
        mp.mpf("106.793576974430535791797776289921378804"),
    ]
    for a, b in zip(table[2], expected):
        assert rel(a, b) < mp.mpf(10) ** -38
    for z in table[2]:
        assert abs(fam.vn_recurrence(z, V, 3)) < mp.mpf(10) ** -30 * 106 ** 3


def test_zeros_need_positive_parameters(ctx50):
    with pytest.raises(UnsupportedParametersError):
        fam.vn_zeros(fam.InfiniteFamilyParams(HALF, (1, -1, 1)), 2)
    with pytest.raises(InvalidArgumentError):
        fam.vn_zeros(fam.InfiniteFamilyParams(HALF, (1, 1, 1)), 0)


small = st.floats(0.05, 0.6, allow_nan=False)
coord = st.floats(-2, 2, allow_nan=False)


@given(small, small, small, small, coord, coord, st.integers(0, 8))
def test_series_equals_recurrence_finite(a, b, c, d, re, im, n):
    with mp.workdps(45):
        P = fam.FiniteFamilyParams(HALF, (a, b, c, d))
        x = mp.mpc(re, im)
        s, r = fam.pn_series(x, P, n), fam.pn_recurrence(x, P, n)
        assert abs(s - r) <= mp.mpf(10) ** -28 * max(1, abs(s), abs(r))


@given(st.floats(0.3, 4), st.floats(0.3, 4), st.floats(0.3, 4), coord, coord, st.integers(0, 8))
def test_series_equals_recurrence_infinite(a, b, c, re, im, n):
    with mp.workdps(45):
        V = fam.InfiniteFamilyParams(HALF, (a, b, c))
        x = mp.mpc(re, im)
        s, r = fam.vn_series(x, V, n), fam.vn_recurrence(x, V, n)
        assert abs(s - r) <= mp.mpf(10) ** -28 * max(1, abs(s), abs(r))


@given(st.floats(0.3, 4), st.floats(0.3, 4), st.floats(0.3, 4), coord, st.integers(0, 6))
def test_normalised_infinite_family_is_symmetric(a, b, c, x, n):
    with mp.workdps(45):
        x = mp.mpf(x)
        vals = [fam.vn_tilde(x, fam.InfiniteFamilyParams(HALF, perm), n) for perm in itertools.permutations((a, b, c))]
        for v in vals[1:]:
            assert abs(v - vals[0]) <= mp.mpf(10) ** -28 * max(1, abs(vals[0]))


@given(small, small, small, small, st.integers(0, 6))
def test_B_coefficients_symmetric(a, b, c, d, n):
    with mp.workdps(45):
        base = fam.finite_recurrence_coeffs(fam.FiniteFamilyParams(HALF, (a, b, c, d)), n + 1).B[n]
        other = fam.finite_recurrence_coeffs(fam.FiniteFamilyParams(HALF, (d, b, a, c)), n + 1).B[n]
        assert abs(base - other) <= mp.mpf(10) ** -30 * max(1, abs(base))
