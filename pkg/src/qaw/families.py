"""The two polynomial families.

``p_n(x; t1, t2, t3, t4)`` is the four-parameter family orthogonal on the
real line for degrees up to ``N_orth``; ``V_n(x; t1, t2, t3)`` is its
``t4 -> 0`` limit and is orthogonal for all degrees.  Both are available as
terminating basic hypergeometric series and through their three-term
recurrences; the test-suite checks that the two agree.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from mpmath import mp

from .errors import (
    CoefficientSingularityError,
    InvalidArgumentError,
    InvalidParametersError,
    UnsupportedParametersError,
)
from .numctx import PrecisionContext, resolve, zpoint_from_x
from .qseries import PhiSpec, check_base, phi_eval, qpoch_finite, qpoch_infinite, qpoch_many


def _as_params(t, size):
    vals = tuple(mp.mpmathify(v) for v in t)
    if len(vals) != size:
        raise InvalidParametersError(f"expected {size} parameters, got {len(vals)}")
    if any(v == 0 for v in vals):
        raise InvalidParametersError("parameters must be nonzero")
    return vals


def pair_products(t):
    return [t[i] * t[j] for i, j in itertools.combinations(range(len(t)), 2)]


def elementary_symmetric(t):
    """sigma_1, ..., sigma_len(t) of the parameters."""
    return [mp.fsum(mp.fprod(c) for c in itertools.combinations(t, k)) for k in range(1, len(t) + 1)]


@dataclass(frozen=True)
class FiniteFamilyParams:
    q: object
    t: tuple

    def __post_init__(self):
        object.__setattr__(self, "q", check_base(self.q))
        object.__setattr__(self, "t", _as_params(self.t, 4))

    @property
    def sigma4(self):
        return mp.fprod(self.t)

    @property
    def integrability_product(self):
        """|t1 t2 t3 t4| q^-3; moments of order <= 2N exist while it is < q^(2N)."""
        return abs(self.sigma4) / self.q ** 3

    @property
    def n_orth(self) -> int:
        """Largest N with |t1 t2 t3 t4| q^-3 < q^(2N); -1 when not integrable."""
        lhs = self.integrability_product
        n = -1
        while lhs < self.q ** (2 * (n + 1)):
            n += 1
            if n > 10000:
                break
        return n

    @property
    def is_conjugate_pair(self) -> bool:
        t1, t2, t3, t4 = self.t
        return t1 == mp.conj(t2) and t3 == mp.conj(t4) and mp.im(t1) != 0 and mp.im(t3) != 0

    def scaled(self, c):
        return FiniteFamilyParams(self.q, tuple(c * v for v in self.t))


@dataclass(frozen=True)
class InfiniteFamilyParams:
    q: object
    t: tuple

    def __post_init__(self):
        object.__setattr__(self, "q", check_base(self.q))
        object.__setattr__(self, "t", _as_params(self.t, 3))

    @property
    def positive(self) -> bool:
        return all(mp.im(v) == 0 and mp.re(v) > 0 for v in self.t)

    def scaled(self, c):
        return InfiniteFamilyParams(self.q, tuple(c * v for v in self.t))


@dataclass
class RecurrenceCoeffs:
    """Coefficients of 2x P_n = A_n P_{n+1} + B_n P_n + C_n P_{n-1}, n = 0..len-1."""

    A: list = field(default_factory=list)
    B: list = field(default_factory=list)
    C: list = field(default_factory=list)


# ---------------------------------------------------------------- finite family


def pn_series(x, params: FiniteFamilyParams, n: int, z=None):
    """p_n from its terminating 4phi3 representation.

    The prefactor (-q^2/t1t_j; q)_n is merged into the sum as
    (-q^{k+2}/t1t_j; q)_{n-k}, so no denominator can vanish.
    """
    if n < 0:
        raise InvalidArgumentError("degree must be nonnegative")
    q = params.q
    t1, t2, t3, t4 = params.t
    s4 = params.sigma4
    if z is None:
        z = zpoint_from_x(x).z_pos
    a_top = q ** (n + 3) / s4
    b_top = -q / (t1 * z)
    c_top = q * z / t1
    total = 0
    top = mp.mpf(1)  # (q^-n, q^{n+3}/s4, -q/t1z, qz/t1; q)_k q^k / (q;q)_k
    qk = mp.mpf(1)
    for k in range(n + 1):
        tail = mp.mpf(1)
        for tj in (t2, t3, t4):
            tail *= qpoch_finite(-q ** (k + 2) / (t1 * tj), q, n - k)
        total += top * tail
        top *= (1 - q ** (k - n)) * (1 - a_top * qk) * (1 - b_top * qk) * (1 - c_top * qk) * q / (1 - qk * q)
        qk *= q
    return (t1 / q) ** n * total


def finite_recurrence_coeffs(params: FiniteFamilyParams, n: int) -> RecurrenceCoeffs:
    """A_k, B_k, C_k for k = 0..n-1."""
    q = params.q
    t = params.t
    t1 = t[0]
    s4 = params.sigma4
    out = RecurrenceCoeffs()
    others = t[1:]
    for k in range(n):
        d1 = 1 - q ** (2 * k + 3) / s4
        d2 = 1 - q ** (2 * k + 4) / s4
        d0 = 1 - q ** (2 * k + 2) / s4
        if d0 == 0 or d1 == 0 or d2 == 0:
            raise CoefficientSingularityError(f"recurrence coefficient singular at n = {k}")
        A = (1 - q ** (k + 3) / s4) / (d1 * d2)
        prod = mp.fprod(1 + q ** (k + 1) / tt for tt in pair_products(t))
        C = -(1 - q ** k) * prod / (d0 * d1)
        up = mp.fprod(1 + q ** (k + 2) / (t1 * tj) for tj in others)
        down = mp.fprod(1 + q ** (k + 1) / (t1 * tj) for tj in others)
        if down == 0:
            raise CoefficientSingularityError(f"recurrence coefficient singular at n = {k}")
        B = t1 / q - q / t1 - t1 / q * A * up - q * C / (t1 * down)
        if A == 0:
            raise CoefficientSingularityError(f"A_{k} vanishes")
        out.A.append(A)
        out.B.append(B)
        out.C.append(C)
    return out


def _run_recurrence(x, coeffs: RecurrenceCoeffs, n: int):
    vals = [mp.mpf(1)]
    prev, cur = mp.mpf(0), mp.mpf(1)
    two_x = 2 * mp.mpmathify(x)
    for k in range(n):
        prev, cur = cur, ((two_x - coeffs.B[k]) * cur - coeffs.C[k] * prev) / coeffs.A[k]
        vals.append(cur)
    return vals


def pn_all(x, params: FiniteFamilyParams, n: int, coeffs: RecurrenceCoeffs | None = None):
    """[p_0(x), ..., p_n(x)] from the recurrence."""
    if coeffs is None:
        coeffs = finite_recurrence_coeffs(params, n)
    return _run_recurrence(x, coeffs, n)


def pn_recurrence(x, params: FiniteFamilyParams, n: int):
    return pn_all(x, params, n)[-1]


# -------------------------------------------------------------- infinite family


def vn_prefactor(params: InfiniteFamilyParams, n: int):
    q = params.q
    t1, t2, t3 = params.t
    return (t1 / q) ** n * qpoch_finite(-q ** 2 / (t1 * t3), q, n) / qpoch_finite(-q ** 2 / (t2 * t3), q, n)


def vn_series(x, params: InfiniteFamilyParams, n: int, z=None):
    """V_n from its terminating 3phi2 representation with argument -q^{n+2}/t2t3."""
    if n < 0:
        raise InvalidArgumentError("degree must be nonnegative")
    q = params.q
    t1, t2, t3 = params.t
    if z is None:
        z = zpoint_from_x(x).z_pos
    spec = PhiSpec(
        [q ** (-n), -q / (t1 * z), q * z / t1],
        [-q ** 2 / (t1 * t3), -q ** 2 / (t1 * t2)],
        -q ** (n + 2) / (t2 * t3),
        terminating_order=n,
    )
    return vn_prefactor(params, n) * phi_eval(spec, q)


def vn_tilde(x, params: InfiniteFamilyParams, n: int, z=None):
    """Normalisation of V_n that is symmetric in (t1, t2, t3)."""
    q = params.q
    t1, t2, t3 = params.t
    return vn_series(x, params, n, z) / ((t1 / q) ** n * qpoch_finite(-q ** 2 / (t1 * t3), q, n))


def infinite_recurrence_coeffs(params: InfiniteFamilyParams, n: int) -> RecurrenceCoeffs:
    """a_k, b_k, c_k (stored as A, B, C) for k = 0..n-1."""
    q = params.q
    t1, t2, t3 = params.t
    out = RecurrenceCoeffs()
    for k in range(n):
        a = -t2 * t3 / q ** (2 * k + 2) * (1 + q ** (k + 2) / (t1 * t2)) * (1 + q ** (k + 2) / (t2 * t3))
        if a == 0:
            raise CoefficientSingularityError(f"a_{k} vanishes")
        b = (t1 + t2 + t3) / q ** (k + 1) + t1 * t2 * t3 / q ** (2 * k + 3) * (1 + q - q ** (k + 1))
        c = -t1 ** 2 * t2 * t3 / q ** (2 * k + 3) * (1 - q ** k) * (1 + q ** (k + 1) / (t1 * t3))
        out.A.append(a)
        out.B.append(b)
        out.C.append(c)
    return out


def vn_all(x, params: InfiniteFamilyParams, n: int, coeffs: RecurrenceCoeffs | None = None):
    if coeffs is None:
        coeffs = infinite_recurrence_coeffs(params, n)
    return _run_recurrence(x, coeffs, n)


def vn_recurrence(x, params: InfiniteFamilyParams, n: int):
    return vn_all(x, params, n)[-1]


def leading_coefficient(coeffs: RecurrenceCoeffs, n: int):
    """Leading x-coefficient 2^n / prod_{k<n} A_k of the recurrence solution."""
    return mp.mpf(2) ** n / mp.fprod(coeffs.A[:n])


def vn_as_limit_of_pn(x, q, t1, t2, t3, n: int, t4_sequence: Sequence):
    """Normalised p_n as t4 -> 0 against V_n.

    Returns a dict with the ratios, their distance to V_n and the
    differences between consecutive ratios.
    """
    target = vn_recurrence(x, InfiniteFamilyParams(q, (t1, t2, t3)), n)
    q = check_base(q)
    ratios = []
    for t4 in t4_sequence:
        p = FiniteFamilyParams(q, (t1, t2, t3, t4))
        norm = qpoch_many([-q ** 2 / (t1 * t4), -q ** 2 / (t1 * t2), -q ** 2 / (t2 * t3)], q, n)
        ratios.append(pn_series(x, p, n) / norm)
    return {
        "ratios": ratios,
        "target": target,
        "errors": [abs(r - target) for r in ratios],
        "differences": [abs(b - a) for a, b in zip(ratios, ratios[1:])],
    }


# -------------------------------------------------------- connection coefficients


def _terminating_sum(ups, downs, arg, q, length):
    spec = PhiSpec(list(ups), list(downs), arg, terminating_order=length)
    return phi_eval(spec, q)


def connection_p(params_s: FiniteFamilyParams, params_t: FiniteFamilyParams, n: int):
    """c_{k,n} with p_n(x, s) = sum_k c_{k,n} p_k(x, t); requires s4 = t4."""
    q = params_s.q
    if params_t.q != q:
        raise InvalidParametersError("both parameter sets must share q")
    s1, s2, s3, s4 = params_s.t
    t1, t2, t3, t4 = params_t.t
    if s4 != t4:
        raise InvalidParametersError("connection_p needs the fourth parameters to agree")
    st = s1 * s2 * s3 * t4
    tt = params_t.sigma4
    svec = (s1, s2, s3)
    out = []
    for k in range(n + 1):
        pre = qpoch_many([-q ** 2 / (sj * t4) for sj in svec] + [q], q, n)
        pre *= qpoch_finite(q ** (n + 3) / st, q, k) * q ** (k * k - n * k)
        pre /= qpoch_many([-q ** 2 / (sj * t4) for sj in svec] + [q], q, k)
        pre /= qpoch_finite(q ** (k + 3) / tt, q, k) * qpoch_finite(q, q, n - k)
        pre *= (q / t4) ** (k - n)
        ups = [q ** (k - n), q ** (n + k + 3) / st] + [-q ** (k + 2) / (tj * t4) for tj in (t1, t2, t3)]
        downs = [q ** (2 * k + 4) / tt] + [-q ** (k + 2) / (sj * t4) for sj in svec]
        out.append(pre * _terminating_sum(ups, downs, q, q, n - k))
    return out


def connection_v(params_s: InfiniteFamilyParams, params_t: InfiniteFamilyParams, n: int):
    """e_{k,n} with V_n(x, s) = sum_k e_{k,n} V_k(x, t); requires s3 = t3."""
    q = params_s.q
    if params_t.q != q:
        raise InvalidParametersError("both parameter sets must share q")
    s1, s2, s3 = params_s.t
    t1, t2, t3 = params_t.t
    if s3 != t3:
        raise InvalidParametersError("connection_v needs the third parameters to agree")
    out = []
    for k in range(n + 1):
        pre = qpoch_many([-q ** 2 / (s1 * t3), q], q, n) * qpoch_many([-q ** 2 / (t2 * t3), -q ** 2 / (t1 * t2)], q, k)
        pre /= qpoch_finite(-q ** 2 / (s1 * s2), q, n)
        pre /= qpoch_many([-q ** 2 / (s1 * t3), -q ** 2 / (s2 * t3), q], q, k) * qpoch_finite(q, q, n - k)
        pre *= q ** (k - n) * s1 ** n * (t2 / (s1 * s2)) ** k
        ups = [q ** (k - n), -q ** (k + 2) / (t1 * t3), -q ** (k + 2) / (t2 * t3)]
        downs = [-q ** (k + 2) / (s1 * t3), -q ** (k + 2) / (s2 * t3)]
        arg = q ** (n - k) * t1 * t2 / (s1 * s2)
        out.append(pre * _terminating_sum(ups, downs, arg, q, n - k))
    return out


# ---------------------------------------------------------- generating functions


def _phi21_coefficients(a, b, c, scale, q, K):
    """Coefficients of T^j, j <= K, in 2phi1(a, b; c; q, scale*T)."""
    out = []
    term = mp.mpf(1)
    for j in range(K + 1):
        out.append(term)
        term *= (1 - a * q ** j) * (1 - b * q ** j) / ((1 - c * q ** j) * (1 - q ** (j + 1))) * scale
    return out


def _cauchy(u, v, K):
    return [mp.fsum(u[i] * v[j - i] for i in range(j + 1)) for j in range(K + 1)]


def _euler_coefficients(a, q, K):
    """Coefficients of T^j in (aT; q)_inf = sum (-a T)^j q^{j(j-1)/2} / (q;q)_j."""
    return [(-a) ** j * q ** (j * (j - 1) // 2) / qpoch_finite(q, q, j) for j in range(K + 1)]


def _inverse_euler_coefficients(b, q, K):
    """Coefficients of T^j in 1/(bT; q)_inf = sum (bT)^j / (q;q)_j."""
    return [b ** j / qpoch_finite(q, q, j) for j in range(K + 1)]


def genfun_sides(family: str, params, x, K: int):
    """Order-K Taylor coefficients of both sides of the generating function.

    Finite family:
        sum_n p_n T^n / (q, -q^2/t1t2, -q^2/t3t4; q)_n
          = 2phi1(qz/t1, qz/t2; -q^2/t1t2; q, -T/z) 2phi1(-q/zt3, -q/zt4; -q^2/t3t4; q, zT)
    Infinite family:
        sum_n (-q^2/t2t3; q)_n / (q; q)_n V_n (T t3/t1)^n
          = 2phi1(qz/t1, qz/t2; -q^2/t1t2; q, -T/z) (-T/z; q)_inf / (T t3/q; q)_inf
    """
    q = params.q
    z = zpoint_from_x(x).z_pos
    if family == "p":
        t1, t2, t3, t4 = params.t
        coeffs = finite_recurrence_coeffs(params, K)
        vals = pn_all(x, params, K, coeffs)
        left = [vals[n] / qpoch_many([q, -q ** 2 / (t1 * t2), -q ** 2 / (t3 * t4)], q, n) for n in range(K + 1)]
        right = _cauchy(
            _phi21_coefficients(q * z / t1, q * z / t2, -q ** 2 / (t1 * t2), -1 / z, q, K),
            _phi21_coefficients(-q / (z * t3), -q / (z * t4), -q ** 2 / (t3 * t4), z, q, K),
            K,
        )
        return left, right
    if family == "V":
        t1, t2, t3 = params.t
        vals = vn_all(x, params, K)
        left = [
            qpoch_finite(-q ** 2 / (t2 * t3), q, n) / qpoch_finite(q, q, n) * vals[n] * (t3 / t1) ** n
            for n in range(K + 1)
        ]
        right = _cauchy(
            _cauchy(
                _phi21_coefficients(q * z / t1, q * z / t2, -q ** 2 / (t1 * t2), -1 / z, q, K),
                _euler_coefficients(-1 / z, q, K),
                K,
            ),
            _inverse_euler_coefficients(t3 / q, q, K),
            K,
        )
        return left, right
    raise InvalidArgumentError(f"unknown family {family!r}")


def genfun_closed_form(family: str, params, x, T):
    """Right-hand side of the generating function summed in closed form."""
    q = params.q
    z = zpoint_from_x(x).z_pos
    T = mp.mpmathify(T)
    if family == "p":
        t1, t2, t3, t4 = params.t
        a = phi_eval(PhiSpec([q * z / t1, q * z / t2], [-q ** 2 / (t1 * t2)], -T / z), q)
        b = phi_eval(PhiSpec([-q / (z * t3), -q / (z * t4)], [-q ** 2 / (t3 * t4)], z * T), q)
        return a * b
    if family == "V":
        t1, t2, t3 = params.t
        a = phi_eval(PhiSpec([q * z / t1, q * z / t2], [-q ** 2 / (t1 * t2)], -T / z), q)
        return a * qpoch_infinite(-T / z, q) / qpoch_infinite(T * t3 / q, q)
    raise InvalidArgumentError(f"unknown family {family!r}")


def genfun_residual(family: str, params, x, T, K: int):
    """Relative gap between the order-K partial sum of the left side and the closed form."""
    left, _ = genfun_sides(family, params, x, K)
    T = mp.mpmathify(T)
    lhs = mp.fsum(c * T ** j for j, c in enumerate(left))
    rhs = genfun_closed_form(family, params, x, T)
    return abs(lhs - rhs) / abs(rhs)


# --------------------------------------------------------------------- zeros


def _gershgorin_bound(coeffs: RecurrenceCoeffs, n: int):
    """Bound on |zeros| from the symmetrised Jacobi matrix of the monic recurrence."""
    best = mp.mpf(0)
    for k in range(n):
        r = abs(coeffs.B[k]) / 2
        if k > 0:
            r += mp.sqrt(abs(coeffs.A[k - 1] * coeffs.C[k])) / 2
        if k + 1 < n:
            r += mp.sqrt(abs(coeffs.A[k] * coeffs.C[k + 1])) / 2
        best = max(best, r)
    return best


def _bisect(f, lo, hi, flo):
    """Sign-change root of f on [lo, hi], refined to working precision."""
    tol = mp.eps * 4
    for _ in range(mp.prec + 64):
        mid = (lo + hi) / 2
        if mid == lo or mid == hi or hi - lo <= tol * max(abs(lo), abs(hi)):
            break
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return (lo + hi) / 2


def vn_zero_table(params: InfiniteFamilyParams, n_max: int):
    """Zeros of V_1, ..., V_{n_max}; entry n-1 holds the sorted zeros of V_n.

    Degree n zeros are bracketed by the degree n-1 zeros (interlacing) and
    a Gershgorin bound on the Jacobi matrix, then found by bisection.
    """
    if not params.positive:
        raise UnsupportedParametersError("zeros are computed only for positive parameters")
    if n_max < 1:
        raise InvalidArgumentError("degree must be at least 1")
    coeffs = infinite_recurrence_coeffs(params, n_max)
    for k in range(n_max - 1):
        if not coeffs.A[k] * coeffs.C[k + 1] > 0:
            raise UnsupportedParametersError("a_n c_{n+1} > 0 fails; zeros need not be real")
    bound = _gershgorin_bound(coeffs, n_max) * (1 + mp.mpf(10) ** -5) + 1
    table = []
    prev: list = []
    for n in range(1, n_max + 1):

        def f(x, n=n):
            return _run_recurrence(x, coeffs, n)[-1]

        edges = [-bound] + prev + [bound]
        zeros = []
        for lo, hi in zip(edges, edges[1:]):
            flo = f(lo)
            if flo == 0:
                zeros.append(lo)
                continue
            zeros.append(_bisect(f, lo, hi, flo))
        table.append(zeros)
        prev = zeros
    return table


def vn_zeros(params: InfiniteFamilyParams, n: int):
    """Sorted real zeros of V_n for positive parameters."""
    return vn_zero_table(params, n)[-1]
