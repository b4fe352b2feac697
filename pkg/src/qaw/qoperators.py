"""Askey-Wilson divided difference and averaging operators, and identity checks.

A function of x is handled through its z-form f(z) = f((z - 1/z)/2).
Weights are genuinely functions of z (they change sign under z -> -1/z),
so every operator call takes an explicit z; for real x the positive branch
is used.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from mpmath import mp

from .errors import InvalidArgumentError, SingularPointError
from .families import (
    FiniteFamilyParams,
    InfiniteFamilyParams,
    pair_products,
    pn_recurrence,
    vn_recurrence,
)
from .measures import build_line_rule, discrete_node, weight_z
from .numctx import resolve, x_from_z, zpoint_from_x
from .qseries import check_base, qpoch_finite


@dataclass
class CurveFunction:
    """A function given by its z-form; ``degree`` is set for polynomials in x."""

    fz: Callable
    is_polynomial: bool = False
    degree: int | None = None

    @classmethod
    def from_x(cls, f: Callable, degree: int | None = None):
        return cls(lambda z: f(x_from_z(z)), degree is not None, degree)

    def __call__(self, z):
        return self.fz(z)


def _as_curve(f):
    return f if isinstance(f, CurveFunction) else CurveFunction(f)


def _z_of(x, z):
    return zpoint_from_x(x).z_pos if z is None else mp.mpmathify(z)


def aw_dq(f, x, q, z=None):
    """(D_q f)(x) = [f(q^1/2 z) - f(q^-1/2 z)] / [(q^1/2 - q^-1/2)(z + 1/z)/2]."""
    f = _as_curve(f)
    z = _z_of(x, z)
    h = mp.sqrt(q)
    den = (h - 1 / h) * (z + 1 / z) / 2
    if den == 0:
        raise SingularPointError("D_q is singular where z + 1/z = 0")
    return (f(h * z) - f(z / h)) / den


def aw_avg(f, x, q, z=None):
    """(A_q f)(x) = [f(q^1/2 z) + f(q^-1/2 z)] / 2."""
    f = _as_curve(f)
    z = _z_of(x, z)
    h = mp.sqrt(q)
    return (f(h * z) + f(z / h)) / 2


def aw_dq_curve(f, q) -> CurveFunction:
    """D_q f as a new z-form function."""
    f = _as_curve(f)
    deg = None if f.degree is None else max(f.degree - 1, 0)
    return CurveFunction(lambda z: aw_dq(f, None, q, z=z), f.is_polynomial, deg)


def aw_dq_power(f, n: int, x, q, z=None):
    """D_q^n f at x, by recursive shifted evaluation with memoised f."""
    f = _as_curve(f)
    z = _z_of(x, z)
    h = mp.sqrt(q)
    cache = {}

    def base(e):
        # f at z * q^(e/2)
        if e not in cache:
            cache[e] = f(z * h ** e)
        return cache[e]

    def rec(k, e):
        # (D_q^k f) at the point z q^(e/2)
        if k == 0:
            return base(e)
        zz = z * h ** e
        den = (h - 1 / h) * (zz + 1 / zz) / 2
        return (rec(k - 1, e + 1) - rec(k - 1, e - 1)) / den

    return rec(n, 0)


@dataclass
class OperatorIdentityReport:
    name: str
    points: list
    residual: object
    scale: object
    details: dict = field(default_factory=dict)

    @property
    def relative(self):
        return self.residual / self.scale if self.scale else self.residual


def _report(name, rows):
    """rows: list of (point, lhs, rhs)."""
    res = max(abs(l - r) for _, l, r in rows)
    scale = max(max(abs(l), abs(r)) for _, l, r in rows)
    return OperatorIdentityReport(name, [p for p, _, _ in rows], res, scale)


def _family(params):
    if isinstance(params, FiniteFamilyParams):
        return "p"
    if isinstance(params, InfiniteFamilyParams):
        return "V"
    raise InvalidArgumentError("parameters must be a finite or infinite family")


def _poly(params, n):
    if n < 0:
        return lambda x: mp.mpf(0)
    if _family(params) == "p":
        return lambda x: pn_recurrence(x, params, n)
    return lambda x: vn_recurrence(x, params, n)


def _curve_poly(params, n):
    return CurveFunction.from_x(_poly(params, n), degree=max(n, 0))


def _points(xs):
    return [mp.mpmathify(x) for x in (xs if isinstance(xs, (list, tuple)) else [xs])]


def dq_basis_identity(a, q, k: int, x):
    """Residual of D_q (-a/z, az; q)_k = -2a (1-q^k)/(1-q) (-a q^1/2/z, a q^1/2 z; q)_{k-1}."""
    if k < 1:
        raise InvalidArgumentError("k must be at least 1")
    a = mp.mpmathify(a)
    h = mp.sqrt(q)
    z = zpoint_from_x(x).z_pos
    f = CurveFunction(lambda zz: qpoch_finite(-a / zz, q, k) * qpoch_finite(a * zz, q, k))
    lhs = aw_dq(f, x, q, z=z)
    rhs = -2 * a * (1 - q ** k) / (1 - q) * qpoch_finite(-a * h / z, q, k - 1) * qpoch_finite(a * h * z, q, k - 1)
    return _report("dq-basis", [(x, lhs, rhs)])


def lowering_residual(params, n: int, xs) -> OperatorIdentityReport:
    """D_q P_n(x; t) against the constant times P_{n-1}(x; q^-1/2 t)."""
    q = params.q
    h = mp.sqrt(q)
    fam = _family(params)
    shifted = params.scaled(1 / h)
    if fam == "p":
        s4 = params.sigma4
        const = 2 * (1 - q ** n) * (1 - q ** (n + 3) / s4) / ((1 - q) * q ** (mp.mpf(n - 1) / 2))
    else:
        t1, t2, t3 = params.t
        const = -2 * q ** (mp.mpf(n + 3) / 2) * (1 - q ** n)
        const /= (1 - q) * (1 + q ** 2 / (t1 * t2)) * (1 + q ** 2 / (t2 * t3)) * (t2 * t3)
    f = _curve_poly(params, n)
    rows = []
    for x in _points(xs):
        rhs = const * _poly(shifted, n - 1)(x) if n >= 1 else mp.mpf(0)
        rows.append((x, aw_dq(f, x, q), rhs))
    return _report(f"lowering-{fam}", rows)


def _weight_curve(params, normalized=True):
    q, t = params.q, params.t
    return CurveFunction(lambda z: weight_z(z, t, q, normalized))


def raising_residual(params, n: int, xs) -> OperatorIdentityReport:
    """(1/w(x; q^1/2 t)) D_q [w(x; t) P_n(x; t)] against the constant times P_{n+1}(x; q^1/2 t)."""
    q = params.q
    h = mp.sqrt(q)
    fam = _family(params)
    up = params.scaled(h)
    if fam == "p":
        s4 = params.sigma4
        const = 2 * q ** (-mp.mpf(n) / 2) * (1 - q ** 2 / s4) * (1 - q ** 3 / s4)
        const /= (1 - q) * mp.fprod(1 + q / p for p in pair_products(params.t))
    else:
        t1, t2, t3 = params.t
        const = 2 * q ** (3 - mp.mpf(n) / 2) / ((1 - q) * t1 ** 2 * t2 * t3 * (1 + q / (t1 * t3)))
    w = _weight_curve(params)
    wu = _weight_curve(up)
    poly = _poly(params, n)
    prod = CurveFunction(lambda z: w(z) * poly(x_from_z(z)))
    rows = []
    for x in _points(xs):
        z = zpoint_from_x(x).z_pos
        lhs = aw_dq(prod, x, q, z=z) / wu(z)
        rows.append((x, lhs, const * _poly(up, n + 1)(x)))
    return _report(f"raising-{fam}", rows)


def sturm_liouville_eigenvalue(params, n: int):
    q = params.q
    if _family(params) == "p":
        s4 = params.sigma4
        lam = 4 * q ** (1 - n) * (1 - q ** n) * (1 - q ** 4 / s4) * (1 - q ** 5 / s4) * (1 - q ** (n + 3) / s4)
        return lam / ((1 - q) ** 2 * mp.fprod(1 + q ** 2 / p for p in pair_products(params.t)))
    t1, t2, t3 = params.t
    lam = -4 * q ** 7 * (1 - q ** n)
    return lam / ((1 - q) ** 2 * t1 ** 2 * t2 ** 2 * t3 ** 2 * mp.fprod(1 + q ** 2 / p for p in pair_products(params.t)))


def sturm_liouville_residual(params, n: int, xs) -> OperatorIdentityReport:
    """(1/w(x;t)) D_q [w(x; q^-1/2 t) D_q P_n(x; t)] against lambda_n P_n(x; t)."""
    q = params.q
    h = mp.sqrt(q)
    w = _weight_curve(params)
    wd = _weight_curve(params.scaled(1 / h))
    dp = aw_dq_curve(_curve_poly(params, n), q)
    inner = CurveFunction(lambda z: wd(z) * dp(z))
    lam = sturm_liouville_eigenvalue(params, n)
    poly = _poly(params, n)
    rows = []
    for x in _points(xs):
        z = zpoint_from_x(x).z_pos
        rows.append((x, aw_dq(inner, x, q, z=z) / w(z), lam * poly(x)))
    return _report(f"sturm-liouville-{_family(params)}", rows)


def rodrigues_constant(params, n: int):
    q = params.q
    if _family(params) == "p":
        s4 = params.sigma4
        c = q ** (-mp.mpf(n * (n - 1)) / 4) * (2 / (1 - q)) ** n * qpoch_finite(q ** 4 / s4, q, 2 * n)
        for p in pair_products(params.t):
            c /= qpoch_finite(-q ** 2 / p, q, n)
        return c
    t1, t2, t3 = params.t
    c = (2 / (1 - q)) ** n * q ** (mp.mpf(3 * n * n) / 4 + mp.mpf(17 * n) / 4)
    return c / (t1 ** (2 * n) * t2 ** n * t3 ** n * qpoch_finite(-q ** 2 / (t1 * t3), q, n))


def rodrigues_residual(params, n: int, xs) -> OperatorIdentityReport:
    """(1/w(x;t)) D_q^n w(x; q^-n/2 t) against the constant times P_n(x; t)."""
    q = params.q
    w = _weight_curve(params)
    wn = _weight_curve(params.scaled(q ** (-mp.mpf(n) / 2)))
    const = rodrigues_constant(params, n)
    poly = _poly(params, n)
    rows = []
    for x in _points(xs):
        z = zpoint_from_x(x).z_pos
        rows.append((x, aw_dq_power(wn, n, x, q, z=z) / w(z), const * poly(x)))
    return _report(f"rodrigues-{_family(params)}", rows)


def product_rule_residual(f, g, xs, q) -> OperatorIdentityReport:
    """D_q(fg) against (A_q f)(D_q g) + (A_q g)(D_q f)."""
    f, g = _as_curve(f), _as_curve(g)
    fg = CurveFunction(lambda z: f(z) * g(z))
    rows = []
    for x in _points(xs):
        z = zpoint_from_x(x).z_pos
        lhs = aw_dq(fg, x, q, z=z)
        rhs = aw_avg(f, x, q, z=z) * aw_dq(g, x, q, z=z) + aw_avg(g, x, q, z=z) * aw_dq(f, x, q, z=z)
        rows.append((x, lhs, rhs))
    return _report("product-rule", rows)


def integration_by_parts_residual(f, g, q, ctx=None) -> OperatorIdentityReport:
    """Integral of (D_q f) g + (D_q g) f over R, which must vanish.

    f and g are z-forms that decay fast enough on (0, inf); the integral is
    taken in the z > 0 parametrisation where the q^(+-1/2) shifts stay real.
    """
    ctx = resolve(ctx)
    f, g = _as_curve(f), _as_curve(g)
    q = check_base(q)

    def integrand(x):
        z = x + mp.sqrt(x * x + 1)
        return aw_dq(f, x, q, z=z) * g(z) + aw_dq(g, x, q, z=z) * f(z)

    def absolute(x):
        z = x + mp.sqrt(x * x + 1)
        return abs(aw_dq(f, x, q, z=z) * g(z)) + abs(aw_dq(g, x, q, z=z) * f(z))

    # the rule is certified on the integrand itself: |.| has kinks that
    # would stall the trapezoid refinement
    rule = build_line_rule(integrand, q, ctx)
    total = rule.probe_integral
    scale = rule.apply(absolute)
    return OperatorIdentityReport("integration-by-parts", [], abs(total), scale)


def discrete_inner(f, g, alpha, q, ctx=None):
    """<f, g>_alpha = sum_n f(z_n) g(z_n) (q^-1/2 - q^1/2)(z_n + 1/z_n)/2, z_n = q^-n/alpha.

    Shells are added until three consecutive ones are negligible.
    """
    ctx = resolve(ctx)
    f, g = _as_curve(f), _as_curve(g)
    h = mp.sqrt(q)
    tol = min(ctx.series_tol, mp.eps)
    total, scale = mp.mpf(0), mp.mpf(0)
    terms = []
    quiet, k = 0, 0
    while quiet < 3:
        shell = 0
        for n in ((0,) if k == 0 else (k, -k)):
            _, z = discrete_node(n, alpha, q)
            v = f(z) * g(z) * (1 / h - h) * (z + 1 / z) / 2
            terms.append(v)
            shell += abs(v)
        scale = max(scale, shell)
        quiet = quiet + 1 if shell <= tol * scale else 0
        k += 1
        if k > 5000:
            break
    return mp.fsum(terms), mp.fsum(abs(v) for v in terms)


def discrete_integration_by_parts_residual(f, g, alpha, q, ctx=None) -> OperatorIdentityReport:
    """<D_q f, g>_alpha + <f, D_q g>_(alpha q^1/2), which must vanish."""
    f, g = _as_curve(f), _as_curve(g)
    df, dg = aw_dq_curve(f, q), aw_dq_curve(g, q)
    left, s1 = discrete_inner(df, g, alpha, q, ctx)
    right, s2 = discrete_inner(f, dg, alpha * mp.sqrt(q), q, ctx)
    return OperatorIdentityReport("discrete-integration-by-parts", [alpha], abs(left + right), max(s1, s2))
