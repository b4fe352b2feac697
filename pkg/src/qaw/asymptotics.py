"""Large-degree limits as checkable convergence computations.

Each routine evaluates a scaled polynomial along a list of degrees and
returns a :class:`ConvergenceReport` with the errors against the limit
and a fitted geometric rate.  Rates are exponents of q: an error
sequence behaving like ``C q**(eta*n)`` has rate ``eta``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from mpmath import mp

from .errors import InvalidArgumentError, InvalidParametersError, InvalidSequenceError, SingularPointError
from .families import FiniteFamilyParams, InfiniteFamilyParams, pn_recurrence, pn_series, vn_recurrence
from .numctx import resolve, zpoint_from_x
from .qseries import PhiSpec, check_base, phi_eval, qpoch_finite, qpoch_infinite, qpoch_infinite_many, ramanujan_Aq, theta4, w87_eval

REGIMES = (
    "pointwise",
    "bulk",
    "soft-edge",
    "beyond",
    "theta-bulk",
    "param-scaled",
    "qairy",
    "theta-degenerate",
    "large-n",
)


@dataclass
class ScalingSpec:
    regime: str
    c: object = None
    s: object = 1
    r: object = 0
    exponents: tuple | None = None

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise InvalidArgumentError(f"unknown regime {self.regime!r}")


@dataclass
class ConvergenceReport:
    n_values: list
    values: list
    target: object
    errors: list
    rate: object
    extra: dict = field(default_factory=dict)

    def error_at(self, n):
        return self.errors[self.n_values.index(n)]


def fit_rate(n_values: Sequence[int], errors: Sequence, q):
    """Least-squares slope of log(error) vs n over the last half, in units of log q."""
    pairs = [(n, e) for n, e in zip(n_values, errors) if e > 0]
    if len(pairs) < 2:
        return mp.inf
    start = min(len(pairs) // 2, len(pairs) - 2)
    half = pairs[start:]
    ns = [mp.mpf(n) for n, _ in half]
    ls = [mp.log(e) for _, e in half]
    nbar = mp.fsum(ns) / len(ns)
    lbar = mp.fsum(ls) / len(ls)
    slope = mp.fsum((a - nbar) * (b - lbar) for a, b in zip(ns, ls)) / mp.fsum((a - nbar) ** 2 for a in ns)
    return slope / mp.log(q)


def _report(ns, values, target, q, targets=None, **extra):
    if targets is None:
        targets = [target] * len(ns)
    errors = [abs(v - t) for v, t in zip(values, targets)]
    return ConvergenceReport(list(ns), values, target, errors, fit_rate(ns, errors, q), extra)


def _check_ns(ns):
    ns = [int(n) for n in ns]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise InvalidSequenceError("degree list must be strictly increasing")
    return ns


# ------------------------------------------------------------------ pointwise


def pointwise_target(x, params: InfiniteFamilyParams):
    """(-q^2/t1t3)_inf/(-q^2/t2t3)_inf 2phi2(-q/t1z, qz/t1; -q^2/t1t3, -q^2/t1t2; q, -q^2/t2t3)."""
    q = params.q
    t1, t2, t3 = params.t
    z = zpoint_from_x(x).z_pos
    spec = PhiSpec([-q / (t1 * z), q * z / t1], [-q ** 2 / (t1 * t3), -q ** 2 / (t1 * t2)], -q ** 2 / (t2 * t3))
    return qpoch_infinite(-q ** 2 / (t1 * t3), q) / qpoch_infinite(-q ** 2 / (t2 * t3), q) * phi_eval(spec, q)


def pointwise_limit_vn(x, params: InfiniteFamilyParams, n_list) -> ConvergenceReport:
    """q^n V_n(x) / t1^n at fixed x."""
    ns = _check_ns(n_list)
    q = params.q
    t1 = params.t[0]
    vals = [q ** n * vn_recurrence(x, params, n) / t1 ** n for n in ns]
    return _report(ns, vals, pointwise_target(x, params), q)


# ---------------------------------------------------------------------- bulk


def bulk_B(w, params: FiniteFamilyParams):
    """B(w) = (-qw/t1, -qw/t2, -qw/t3, -qw/t4; q)_inf / (-w^2; q)_inf."""
    q = params.q
    return qpoch_infinite_many([-q * w / tj for tj in params.t], q) / qpoch_infinite(-w * w, q)


def bulk_pn(x, params: FiniteFamilyParams, n_list) -> ConvergenceReport:
    """Large-n behaviour of p_n at fixed x.

    Off the segment [-i, i] the report tracks p_n / z_big^n against
    B(-z_small).  On the segment both roots have modulus one and the
    report compares p_n with the two-term form
    z_big^n B(-z_small) + z_small^n B(-z_big); ``extra`` carries the
    error of the single-cosine form 2 C cos(n theta + phi - n pi/2) with
    C e^{i phi} = B(-z_big) for comparison.
    """
    ns = _check_ns(n_list)
    q = params.q
    zp = zpoint_from_x(x)
    if zp.degenerate:
        raise SingularPointError("x = +-i is a degenerate point for the bulk asymptotics")
    z1, z2 = zp.z_small, zp.z_big
    x = zp.x
    on_segment = mp.re(x) == 0 and abs(mp.im(x)) < 1
    vals = [pn_recurrence(x, params, n) for n in ns]
    if not on_segment:
        scaled = [v / z2 ** n for v, n in zip(vals, ns)]
        return _report(ns, scaled, bulk_B(-z1, params), q, on_segment=False)
    # z_small = i e^{i theta}, z_big = i e^{-i theta} with theta in (0, pi)
    if mp.im(z1 / 1j) < 0:
        z1, z2 = z2, z1
    theta = mp.arg(z1 / 1j)
    ce = bulk_B(-z2, params)
    other = bulk_B(-z1, params)
    C, phi = abs(ce), mp.arg(ce)
    targets = [z2 ** n * other + z1 ** n * ce for n in ns]
    cosine = [2 * C * mp.cos(n * theta + phi - n * mp.pi / 2) for n in ns]
    rep = _report(ns, vals, None, q, targets=targets)
    rep.extra.update(
        on_segment=True,
        theta=theta,
        amplitude=C,
        phase=phi,
        two_term_targets=targets,
        cosine_errors=[abs(v - c) for v, c in zip(vals, cosine)],
        amplitude_other=abs(other),
    )
    return rep


# ------------------------------------------------------------ Plancherel-Rotach


def _edge_point(s, c, n, q):
    z = q ** (-c * n) / s
    return (z - 1 / z) / 2


def soft_edge_target(s, params: InfiniteFamilyParams):
    q = params.q
    t1, t2, t3 = params.t
    den = qpoch_infinite_many([-q ** 2 / (t1 * t2), -q ** 2 / (t2 * t3)], q)
    return ramanujan_Aq(s * t1 * t2 * t3 / q ** 2, q) / den


def soft_edge_c2(s, params: InfiniteFamilyParams, n_list) -> ConvergenceReport:
    """(-s t2 t3)^n q^{n^2-n} V_n(x_n(s)) with x_n(s) = (q^-2n/s - q^2n s)/2."""
    ns = _check_ns(n_list)
    q = params.q
    s = mp.mpmathify(s)
    if s == 0:
        raise InvalidArgumentError("s must be nonzero")
    t1, t2, t3 = params.t
    vals = [(-s * t2 * t3) ** n * q ** (n * n - n) * vn_recurrence(_edge_point(s, 2, n, q), params, n) for n in ns]
    return _report(ns, vals, soft_edge_target(s, params), q)


def beyond_edge(s, params: InfiniteFamilyParams, c, n_list) -> ConvergenceReport:
    """q^{(c-1)n^2 - n} (-s t2 t3)^n V_n(x_n(s)) for c > 2."""
    ns = _check_ns(n_list)
    q = params.q
    c = mp.mpmathify(c)
    if not c > 2:
        raise InvalidParametersError("beyond_edge needs c > 2")
    s = mp.mpmathify(s)
    t1, t2, t3 = params.t
    target = 1 / qpoch_infinite_many([-q ** 2 / (t1 * t2), -q ** 2 / (t2 * t3)], q)
    vals = [
        q ** ((c - 1) * n * n - n) * (-s * t2 * t3) ** n * vn_recurrence(_edge_point(s, c, n, q), params, n)
        for n in ns
    ]
    return _report(ns, vals, target, q)


def theta_bulk_target(s, params: InfiniteFamilyParams, r, form="product"):
    r"""Limit for 1 <= c < 2 with fractional part r = {cn/2}.

    Product form q^{r^2} (q^2, q^{3-2r}/P, q^{2r-1} P; q^2)_inf / (q, -q^2/t1t2, -q^2/t2t3; q)_inf
    with P = s t1 t2 t3; the sum form is the bilateral series
    sum_j (-1)^j q^{(j+r)^2} (P/q^2)^j over the same denominator.
    """
    q = params.q
    t1, t2, t3 = params.t
    P = mp.mpmathify(s) * t1 * t2 * t3
    r = mp.mpmathify(r)
    den = qpoch_infinite_many([q, -q ** 2 / (t1 * t2), -q ** 2 / (t2 * t3)], q)
    if form == "product":
        q2 = q * q
        return q ** (r * r) * qpoch_infinite_many([q2, q ** (3 - 2 * r) / P, q ** (2 * r - 1) * P], q2) / den
    if form == "sum":
        eps = mp.eps
        total, j = mp.mpf(0), 0
        while True:
            terms = [(-1) ** jj * q ** ((jj + r) ** 2) * (P / q ** 2) ** jj for jj in ((j,) if j == 0 else (j, -j))]
            total += mp.fsum(terms)
            if j > 3 and max(abs(t) for t in terms) < eps * max(abs(total), eps):
                break
            j += 1
        return total / den
    raise InvalidArgumentError(f"unknown form {form!r}")


def theta_bulk(s, params: InfiniteFamilyParams, c, n_list) -> ConvergenceReport:
    """(-s t2 t3)^m q^{n + c^2 n^2/4 - 2m} t1^{m-n} V_n(x_n(s)), m = floor(cn/2)."""
    ns = _check_ns(n_list)
    q = params.q
    c = mp.mpmathify(c)
    if not 1 <= c < 2:
        raise InvalidParametersError("theta_bulk needs 1 <= c < 2")
    s = mp.mpmathify(s)
    t1, t2, t3 = params.t
    fracs = [c * n / 2 - mp.floor(c * n / 2) for n in ns]
    if any(abs(f - fracs[0]) > mp.eps * 100 * max(ns) for f in fracs):
        raise InvalidSequenceError("fractional part of c n / 2 must be constant along the sequence")
    r = fracs[0]
    vals = []
    for n in ns:
        m = int(mp.floor(c * n / 2))
        v = vn_recurrence(_edge_point(s, c, n, q), params, n)
        vals.append((-s * t2 * t3) ** m * q ** (n + c * c * n * n / 4 - 2 * m) * t1 ** (m - n) * v)
    return _report(ns, vals, theta_bulk_target(s, params, r), q, r=r)


# ------------------------------------------------------- parameter-scaled limits


def param_scaled_target(z, params: InfiniteFamilyParams):
    r"""1phi1(qz/t1; 0; q, -q^2/t2t3) / (-q^2/t2t3; q)_inf."""
    q = params.q
    t1, t2, t3 = params.t
    spec = PhiSpec([q * z / t1], [0], -q ** 2 / (t2 * t3))
    return phi_eval(spec, q) / qpoch_infinite(-q ** 2 / (t2 * t3), q)


def param_scaled_limit(z, params: InfiniteFamilyParams, alpha, n_list) -> ConvergenceReport:
    """q^{n^2 alpha + n} t1^-n V_n(x; t1 q^{-n alpha}, t2, t3) at x = (q^{-n alpha} z - q^{n alpha}/z)/2."""
    ns = _check_ns(n_list)
    q = params.q
    alpha = mp.mpmathify(alpha)
    if not alpha > 0:
        raise InvalidParametersError("alpha must be positive")
    z = mp.mpmathify(z)
    t1, t2, t3 = params.t
    vals = []
    for n in ns:
        x = (q ** (-n * alpha) * z - q ** (n * alpha) / z) / 2
        p = InfiniteFamilyParams(q, (t1 * q ** (-n * alpha), t2, t3))
        vals.append(q ** (n * n * alpha + n) / t1 ** n * vn_recurrence(x, p, n))
    return _report(ns, vals, param_scaled_target(z, params), q)


def qairy_bound(exponents):
    alpha, beta, gamma, delta = (mp.mpmathify(e) for e in exponents)
    return min(mp.mpf(1), alpha + beta, beta + delta, beta + gamma)


def qairy_regime(z, t, exponents, q, n_list) -> ConvergenceReport:
    """q^{n^2 beta + n} t1^-n V_n(x; t1 q^{-n beta}, t2 q^{-n gamma}, t3 q^{-n delta}) -> A_q(q^2 z / t1t2t3).

    x = (q^{-n alpha} z - q^{n alpha}/z)/2.  ``extra['bound']`` holds
    min{1, alpha+beta, beta+delta, beta+gamma}.
    """
    ns = _check_ns(n_list)
    q = check_base(q)
    alpha, beta, gamma, delta = (mp.mpmathify(e) for e in exponents)
    if not (alpha > beta > 0 and gamma > 0 and delta > 0):
        raise InvalidParametersError("need alpha > beta > 0 and gamma, delta > 0")
    if abs(gamma + delta - 1) > mp.eps * 10 or abs(alpha - beta - 1) > mp.eps * 10:
        raise InvalidParametersError("need gamma + delta = alpha - beta = 1")
    t1, t2, t3 = (mp.mpmathify(v) for v in t)
    z = mp.mpmathify(z)
    if z * t1 * t2 * t3 == 0:
        raise InvalidParametersError("z t1 t2 t3 must be nonzero")
    target = ramanujan_Aq(q ** 2 * z / (t1 * t2 * t3), q)
    vals = []
    for n in ns:
        x = (q ** (-n * alpha) * z - q ** (n * alpha) / z) / 2
        p = InfiniteFamilyParams(q, (t1 * q ** (-n * beta), t2 * q ** (-n * gamma), t3 * q ** (-n * delta)))
        vals.append(q ** (n * n * beta + n) / t1 ** n * vn_recurrence(x, p, n))
    rep = _report(ns, vals, target, q)
    rep.extra["bound"] = qairy_bound((alpha, beta, gamma, delta))
    return rep


def theta_degenerate(w, alpha, q, n_list, rotated=False) -> ConvergenceReport:
    """(sqrt(q)/i)^n V_n(x; t1, q^{-n alpha}, q^{-n alpha}) against theta_4(w; q^1/2).

    With ``rotated=False`` the point is x = (w + 1/w)/2 and t1 = q^1/2; with
    ``rotated=True`` it is x = i(w + 1/w)/2 and t1 = i q^1/2 (the z = iw
    substitution).  ``extra['errors_against_one']`` records the distance of
    the same scaled values to 1.
    """
    ns = _check_ns(n_list)
    q = check_base(q)
    w = mp.mpmathify(w)
    alpha = mp.mpmathify(alpha)
    if not 0 < alpha < 1:
        raise InvalidParametersError("alpha must lie in (0, 1)")
    if w == 0:
        raise InvalidArgumentError("w must be nonzero")
    k = -2 * mp.log(w) / mp.log(q)
    if mp.im(w) == 0 and w > 0 and abs(k - mp.nint(k)) < mp.eps * 100 and int(mp.nint(k)) % 2 == 1:
        raise InvalidArgumentError("w sits at an excluded node q^{-(2n-1)/2}")
    h = mp.sqrt(q)
    i = mp.mpc(0, 1)
    x = (w + 1 / w) / 2
    t1 = h
    if rotated:
        x, t1 = i * x, i * h
    vals = []
    for n in ns:
        big = q ** (-n * alpha)
        p = InfiniteFamilyParams(q, (t1, big, big))
        vals.append((h / i) ** n * vn_recurrence(x, p, n))
    rep = _report(ns, vals, theta4(w, h), q)
    rep.extra["rotated"] = rotated
    rep.extra["errors_against_one"] = [abs(v - 1) for v in vals]
    return rep


# ---------------------------------------------------------- finite family, large N


def largeN_terms(z, t, q):
    """The two terms of the large-n limit with weights t2^n and t1^n removed.

    first  = (qz/t2, -q/zt2; q)_inf / (q, t1/t2; q)_inf * (-t1t4/q; q)_inf / (-t2t4/q; q)_inf
    second = (qz/t1, -q/zt1; q)_inf / (q, t2/t1; q)_inf * (-t2t3/q; q)_inf / (-t1t3/q; q)_inf
    """
    t1, t2, t3, t4 = t
    first = qpoch_infinite_many([q * z / t2, -q / (z * t2), -t1 * t4 / q], q)
    first /= qpoch_infinite_many([q, t1 / t2, -t2 * t4 / q], q)
    second = qpoch_infinite_many([q * z / t1, -q / (z * t1), -t2 * t3 / q], q)
    second /= qpoch_infinite_many([q, t2 / t1, -t1 * t3 / q], q)
    return first, second


def finite_family_largeN(x, t, q, n_list) -> ConvergenceReport:
    """(q^{n-2} t1t2t3t4)^n / (q, -t1t3/q, -t2t4/q; q)_inf * p_n(x; t1, t2, q^n t3, q^n t4).

    Reported as the ratio to t2^n first + t1^n second (target 1);
    ``extra['dominant_errors']`` keeps the error with the dominant term only.
    """
    ns = _check_ns(n_list)
    q = check_base(q)
    t1, t2, t3, t4 = (mp.mpmathify(v) for v in t)
    if t1 == t2:
        raise InvalidParametersError("t1 = t2 is the confluent case, not covered")
    z = zpoint_from_x(x).z_pos
    first, second = largeN_terms(z, (t1, t2, t3, t4), q)
    den = qpoch_infinite_many([q, -t1 * t3 / q, -t2 * t4 / q], q)
    ratios, dominant = [], []
    for n in ns:
        p = FiniteFamilyParams(q, (t1, t2, q ** n * t3, q ** n * t4))
        lhs = (q ** (n - 2) * t1 * t2 * t3 * t4) ** n / den * pn_recurrence(x, p, n)
        a, b = t2 ** n * first, t1 ** n * second
        ratios.append(lhs / (a + b))
        dom = b if abs(t1) > abs(t2) else a
        dominant.append(abs(lhs / dom - 1))
    rep = _report(ns, ratios, mp.mpf(1), q)
    rep.extra["dominant_errors"] = dominant
    return rep


# ------------------------------------------------------------- 8W7 machinery


def pn_w87(x, params: FiniteFamilyParams, n: int, z=None):
    """p_n through its very-well-poised 8W7 representation."""
    q = params.q
    t1, t2, t3, t4 = params.t
    s4 = params.sigma4
    if z is None:
        z = zpoint_from_x(x).z_pos
    pre = qpoch_finite(-q ** 2 / (t1 * t2), q, n) * qpoch_finite(-q ** 2 / (t1 * t3), q, n)
    pre *= qpoch_finite(-q ** 2 / (t2 * t3), q, n) * qpoch_finite(-q / (t4 * z), q, n)
    pre /= qpoch_finite(-q ** 3 * z / (t1 * t2 * t3), q, n)
    pre *= z ** n
    series = w87_eval(-q ** 2 * z / (t1 * t2 * t3), q * z / t1, q * z / t2, q * z / t3, q ** (n + 3) / s4, q ** (-n), q, t4 / z)
    return pre * series


def qn_term(w, params: FiniteFamilyParams, n: int, ctx=None):
    """Q_n(w, t); p_n = (-q^2/t2t3, -q^2/t2t4, -q^2/t3t4; q)_n (Q_n(-1/z) + Q_n(z))."""
    q = params.q
    t1, t2, t3, t4 = params.t
    w = mp.mpmathify(w)
    num = [
        -w * q ** (n + 3) / (t1 * t2 * t3),
        -w * q ** (n + 3) / (t2 * t3 * t4),
        w * q ** (n + 2) / t2,
        w * q ** (n + 2) / t3,
        -q / (w * t1),
        -q / (w * t2),
        -q / (w * t3),
        -q / (w * t4),
    ]
    den = [
        -q ** 2 / (t2 * t3),
        -q ** 2 / (t2 * t4),
        -q ** 2 / (t3 * t4),
        -q ** (n + 2) / (t1 * t2),
        -q ** (n + 2) / (t1 * t3),
        q ** (n + 1),
        w * w * q ** (n + 3) / (t2 * t3),
        -1 / (w * w),
    ]
    pref = qpoch_infinite_many(num, q, ctx) / qpoch_infinite_many(den, q, ctx) * w ** n
    series = w87_eval(
        w * w * q ** (n + 2) / (t2 * t3),
        -q ** (n + 2) / (t2 * t3),
        q * w / t2,
        q * w / t3,
        -t1 * w,
        -t4 * w,
        q,
        -q ** (n + 2) / (t1 * t4),
        ctx,
    )
    return pref * series


def pn_from_qn(x, params: FiniteFamilyParams, n: int):
    q = params.q
    t1, t2, t3, t4 = params.t
    z = zpoint_from_x(x).z_pos
    pre = qpoch_finite(-q ** 2 / (t2 * t3), q, n) * qpoch_finite(-q ** 2 / (t2 * t4), q, n)
    pre *= qpoch_finite(-q ** 2 / (t3 * t4), q, n)
    return pre * (qn_term(-1 / z, params, n) + qn_term(z, params, n))


def qn_large_n(w, params: FiniteFamilyParams, n: int):
    """w^n B(1/w) / (-q^2/t2t3, -q^2/t2t4, -q^2/t3t4; q)_inf."""
    q = params.q
    t1, t2, t3, t4 = params.t
    den = qpoch_infinite_many([-q ** 2 / (t2 * t3), -q ** 2 / (t2 * t4), -q ** 2 / (t3 * t4)], q)
    return w ** n * bulk_B(1 / w, params) / den


# ------------------------------------------------------------------- zeros


def real_zeros(f, lo, hi, steps: int = 400):
    """Simple real zeros of a real function on [lo, hi] by grid scan and bisection."""
    lo, hi = mp.mpmathify(lo), mp.mpmathify(hi)
    grid = [lo + (hi - lo) * k / steps for k in range(steps + 1)]
    vals = [mp.re(f(g)) for g in grid]
    out = []
    for (a, fa), (b, fb) in zip(zip(grid, vals), zip(grid[1:], vals[1:])):
        if fa == 0:
            out.append(a)
        elif fa * fb < 0:
            for _ in range(mp.prec + 10):
                m = (a + b) / 2
                if m == a or m == b:
                    break
                fm = mp.re(f(m))
                if fm == 0:
                    a = b = m
                    break
                if (fm > 0) == (fa > 0):
                    a, fa = m, fm
                else:
                    b = m
            out.append((a + b) / 2)
    return out


def aq_real_zeros(q, hi, steps: int = 400):
    """Positive real zeros of A_q below ``hi``."""
    return real_zeros(lambda v: ramanujan_Aq(v, q), mp.mpf(0), hi, steps)
