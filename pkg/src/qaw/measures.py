"""Weights, quadrature on the real line, discrete measures and Gram matrices.

Continuous integrals over x are computed through the substitution
``z = q**(-u)`` (so ``x = sinh(u log(1/q))``): the weights decay
geometrically in u and are analytic in a strip of half-width
``pi / (2 log(1/q))`` around the real u-axis, so Gauss-Legendre on unit
u-panels converges fast.  Discrete measures live on the nodes
``x_n(alpha) = (q**-n/alpha - alpha q**n)/2``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

from mpmath import mp

from .errors import DegreeRangeError, InvalidArgumentError, InvalidParametersError, TruncationError
from .families import (
    FiniteFamilyParams,
    InfiniteFamilyParams,
    elementary_symmetric,
    finite_recurrence_coeffs,
    infinite_recurrence_coeffs,
    pair_products,
    pn_all,
    vn_all,
)
from .numctx import PrecisionContext, resolve, x_from_z
from .qseries import check_base, qpoch_finite, qpoch_infinite, qpoch_infinite_many

WEIGHT_KINDS = ("raw-W", "normalized-w", "infinite-family-w")


# ------------------------------------------------------------------- weights


def weight_normaliser(t, q, ctx=None):
    """Total mass of the raw weight.

    Four parameters: -log q (q;q)_inf prod_{j<k}(-t_j t_k/q;q)_inf / (t1t2t3t4/q^3;q)_inf.
    Three parameters: the same with the last factor absent.
    """
    ctx = resolve(ctx)
    return +_normaliser_cached(tuple(mp.mpmathify(v) for v in t), mp.mpmathify(q), ctx, mp.prec)


@lru_cache(maxsize=256)
def _normaliser_cached(t, q, ctx, prec):
    c = -mp.log(q) * qpoch_infinite(q, q, ctx)
    c *= qpoch_infinite_many([-p / q for p in pair_products(t)], q, ctx)
    if len(t) == 4:
        c /= qpoch_infinite(mp.fprod(t) / q ** 3, q, ctx)
    return c


def weight_z(z, t, q, normalized=True, ctx=None):
    """Weight as a function of z (valid off the real line as well).

    2z prod_j (-t_j z, t_j/z; q)_inf / (-z^2, -q/z^2; q)_inf, divided by the
    total mass when ``normalized``.
    """
    ctx = resolve(ctx)
    z = mp.mpmathify(z)
    num = mp.mpf(1)
    for tj in t:
        num *= qpoch_infinite(-tj * z, q, ctx) * qpoch_infinite(tj / z, q, ctx)
    den = qpoch_infinite(-z * z, q, ctx) * qpoch_infinite(-q / (z * z), q, ctx)
    val = 2 * z * num / den
    if normalized:
        val /= weight_normaliser(tuple(t), q, ctx)
    return val


@dataclass(frozen=True)
class ContinuousWeight:
    kind: str
    params: object

    def __post_init__(self):
        if self.kind not in WEIGHT_KINDS:
            raise InvalidArgumentError(f"unknown weight kind {self.kind!r}")
        if self.kind == "infinite-family-w" and not isinstance(self.params, InfiniteFamilyParams):
            raise InvalidParametersError("infinite-family weight needs three parameters")
        if self.kind != "infinite-family-w" and not isinstance(self.params, FiniteFamilyParams):
            raise InvalidParametersError("finite-family weight needs four parameters")

    @property
    def normalizable(self) -> bool:
        if isinstance(self.params, FiniteFamilyParams):
            return self.params.integrability_product < 1
        return True

    def of_z(self, z, ctx=None):
        return weight_z(z, self.params.t, self.params.q, self.kind != "raw-W", ctx)


def weight_eval(w: ContinuousWeight, x, ctx: PrecisionContext | None = None):
    """Weight at real x, evaluated on the positive branch z = x + sqrt(x^2+1)."""
    x = mp.mpmathify(x)
    if mp.im(x) != 0:
        raise InvalidArgumentError("weight_eval expects a real x; use weight_z off the line")
    z = x + mp.sqrt(x * x + 1)
    return w.of_z(z, ctx)


def askey_integral_closed_form(params: FiniteFamilyParams, ctx: PrecisionContext | None = None):
    """Integral of the raw weight over the real line."""
    q = params.q
    if not abs(params.sigma4) < q ** 3:
        raise InvalidParametersError("closed form needs |t1 t2 t3 t4| < q^3")
    return weight_normaliser(params.t, q, ctx)


# ---------------------------------------------------------------- quadrature


@dataclass
class LineRule:
    """Nodes x_i and weights c_i with sum c_i f(x_i) ~ integral of f over R."""

    nodes: list
    weights: list
    error_estimate: object
    panels: int
    probe_integral: object = None

    def apply(self, f: Callable):
        return mp.fsum(c * f(x) for x, c in zip(self.nodes, self.weights))


def build_line_rule(f: Callable, q, ctx: PrecisionContext | None = None, max_levels: int = 12, max_nodes: int = 20000):
    """Nested trapezoid rule in u (x = sinh(u log(1/q))), certified on the probe ``f``.

    The transformed integrand is analytic in the strip |Im u| < pi/(2 log(1/q))
    and decays faster than any exponential, so the trapezoid error falls like
    exp(-2 pi d / h).  The step is halved (reusing all earlier values) until
    two successive sums agree to ``quad_tol``; the last difference is the
    reported error estimate.
    """
    ctx = resolve(ctx)
    q = check_base(q)
    L = -mp.log(q)
    tol = ctx.quad_tol
    h = mp.pi / (2 * L) / 4

    def g(u):
        return f(mp.sinh(u * L)) * L * mp.cosh(u * L)

    def sweep(offset, step, scale, lo=0, hi=0):
        # values at offset + k*step, covering [lo, hi] and then continuing
        # outward until the integrand is negligible at three consecutive nodes
        out = {}
        for sign in (1, -1):
            k = 0 if sign == 1 else -1
            quiet = 0
            while quiet < 3:
                u = offset + k * step
                v = g(u)
                out[u] = v
                inside = lo <= u <= hi
                if not inside and abs(v) * step <= tol * scale * mp.mpf("1e-3"):
                    quiet += 1
                else:
                    quiet = 0
                k += sign
                if len(out) > max_nodes:
                    raise TruncationError("integrand tail did not become negligible")
        return out

    # pilot pass fixes the scale used by the tail test
    pilot = {}
    for k in range(-8, 9):
        pilot[k * h] = g(k * h)
    scale = max(max(abs(v) for v in pilot.values()) * h, mp.eps)
    values = sweep(mp.mpf(0), h, scale, -8 * h, 8 * h)
    total = h * mp.fsum(values.values())
    scale = max(scale, abs(total))
    err = None
    for _ in range(max_levels):
        h /= 2
        values.update(sweep(h, 2 * h, scale, min(values), max(values)))
        new_total = h * mp.fsum(values.values())
        err = abs(new_total - total)
        total = new_total
        scale = max(scale, abs(total))
        if err <= tol * scale:
            break
    else:
        raise TruncationError("trapezoid refinement did not settle")
    nodes, weights = [], []
    for u in sorted(values):
        nodes.append(mp.sinh(u * L))
        weights.append(h * L * mp.cosh(u * L))
    return LineRule(nodes, weights, err, len(nodes), total)


def integrate_line(f: Callable, q, ctx: PrecisionContext | None = None):
    """Integral of ``f`` over R via the nested trapezoid rule in u.

    Returns ``(value, error_estimate)``.
    """
    rule = build_line_rule(f, q, ctx)
    return rule.probe_integral, rule.error_estimate


# ----------------------------------------------------------- discrete measures


def _check_alpha(alpha, q):
    alpha = mp.mpmathify(alpha)
    if not (mp.im(alpha) == 0 and q < alpha < 1):
        raise InvalidParametersError(f"alpha must lie in (q, 1), got {alpha}")
    return mp.re(alpha)


def discrete_node(n: int, alpha, q):
    """(x_n, z_n) with z_n = q^-n / alpha."""
    z = q ** (-n) / alpha
    return x_from_z(z), z


def discrete_mass(n: int, alpha, q, ctx=None, norm=None):
    """m_n(alpha) = alpha^{4n} q^{n(2n-1)} (1 + alpha^2 q^{2n}) / (-alpha^2, -q/alpha^2, q; q)_inf."""
    if norm is None:
        norm = qpoch_infinite_many([-alpha ** 2, -q / alpha ** 2, q], q, ctx)
    return alpha ** (4 * n) * q ** (n * (2 * n - 1)) * (1 + alpha ** 2 * q ** (2 * n)) / norm


def discrete_nodes_masses(alpha, q, nrange: Sequence[int], ctx: PrecisionContext | None = None):
    q = check_base(q)
    alpha = _check_alpha(alpha, q)
    norm = qpoch_infinite_many([-alpha ** 2, -q / alpha ** 2, q], q, ctx)
    xs, ms = [], []
    for n in nrange:
        xs.append(discrete_node(n, alpha, q)[0])
        ms.append(discrete_mass(n, alpha, q, ctx, norm))
    return xs, ms


def askey_discrete_weight(x, q, ctx=None):
    """Density whose values at the nodes reproduce the masses: m_n = w_A(x_n) dx_n."""
    z = mp.mpmathify(x) + mp.sqrt(mp.mpmathify(x) ** 2 + 1)
    return 2 * z / (-mp.log(q) * qpoch_infinite_many([q, -z * z, -q / (z * z)], q, ctx))


def discrete_spacing(n: int, alpha, q):
    """dx_n(alpha) = (q^-n/alpha + alpha q^n)(-log q)/2."""
    return (q ** (-n) / alpha + alpha * q ** n) * (-mp.log(q)) / 2


@dataclass(frozen=True)
class DiscreteMeasure:
    """Masses m_n(alpha) at x_n(alpha), optionally multiplied by an attachment.

    ``attachment`` is one of
      * ``None``;
      * ``"finite"``: prod_{j<=4}(-t_j z, t_j/z; q)_inf scaled to total mass 1;
      * ``"infinite"``: prod_{j<=3}(-c t_j z, c t_j/z; q)_inf with ``shift`` c
        (default 1), under which V_n(x; t) is orthogonal.
    """

    alpha: object
    q: object
    attachment: str | None = None
    params: tuple | None = None
    shift: object = 1

    def __post_init__(self):
        object.__setattr__(self, "q", check_base(self.q))
        object.__setattr__(self, "alpha", _check_alpha(self.alpha, self.q))
        if self.attachment not in (None, "finite", "infinite"):
            raise InvalidArgumentError(f"unknown attachment {self.attachment!r}")
        if self.attachment is not None:
            if self.params is None:
                raise InvalidParametersError("an attachment needs parameters")
            size = 4 if self.attachment == "finite" else 3
            if len(self.params) != size:
                raise InvalidParametersError(f"{self.attachment} attachment needs {size} parameters")
            object.__setattr__(self, "params", tuple(mp.mpmathify(v) for v in self.params))

    def attachment_factor(self, z, ctx=None, _const=None):
        if self.attachment is None:
            return mp.mpf(1)
        q = self.q
        c = mp.mpmathify(self.shift) if self.attachment == "infinite" else 1
        val = mp.mpf(1)
        for tj in self.params:
            val *= qpoch_infinite(-c * tj * z, q, ctx) * qpoch_infinite(c * tj / z, q, ctx)
        if self.attachment == "finite":
            val *= _const if _const is not None else self.finite_constant(ctx)
        return val

    def finite_constant(self, ctx=None):
        q = self.q
        t = self.params
        return qpoch_infinite(mp.fprod(t) / q ** 3, q, ctx) / qpoch_infinite_many([-p / q for p in pair_products(t)], q, ctx)

    def points(self, ctx: PrecisionContext | None = None, probe: Callable | None = None):
        """Nodes and attached masses, truncated adaptively.

        Shells |n| = 0, 1, 2, ... are added until three consecutive shells
        contribute less than series_tol relative to the running total,
        measured on ``probe(x) * mass`` (default probe 1).
        """
        ctx = resolve(ctx)
        q, alpha = self.q, self.alpha
        norm = qpoch_infinite_many([-alpha ** 2, -q / alpha ** 2, q], q, ctx)
        const = self.finite_constant(ctx) if self.attachment == "finite" else None
        tol = min(ctx.series_tol, mp.eps)
        pts = []
        scale = mp.mpf(0)
        quiet = 0
        k = 0
        while quiet < 3:
            shell = 0
            for n in ((0,) if k == 0 else (k, -k)):
                x, z = discrete_node(n, alpha, q)
                m = discrete_mass(n, alpha, q, ctx, norm) * self.attachment_factor(z, ctx, const)
                pts.append((n, x, m))
                shell += abs(m * (probe(x) if probe else 1))
            scale = max(scale, shell)
            quiet = quiet + 1 if shell <= tol * scale else 0
            k += 1
            if k > 5000:
                raise TruncationError("discrete measure tail is not decaying")
        pts.sort(key=lambda p: p[0])
        return pts


def discrete_sum(f: Callable, measure: DiscreteMeasure, ctx: PrecisionContext | None = None):
    """Sum of f(x_n) times the (attached) mass at x_n over all integers n."""
    pts = measure.points(ctx, probe=lambda x: f(x))
    return mp.fsum(f(x) * m for _, x, m in pts)


def totmass_infinite(t, q, shift=1, ctx=None):
    """Closed-form total mass prod_{j<k}(-c^2 t_j t_k / q; q)_inf of the infinite attachment.

    With c = q this is prod(-q t_j t_k; q)_inf; with c = 1 it is prod(-t_j t_k/q; q)_inf.
    """
    c = mp.mpmathify(shift)
    return qpoch_infinite_many([-c * c * p / q for p in pair_products(t)], q, ctx)


# --------------------------------------------------------------------- Gram


@dataclass
class GramReport:
    size: int
    matrix: list
    target_diagonal: list
    max_offdiag: object
    max_diag_relerr: object
    scale: object
    diagonal_signs: list = field(default_factory=list)


def finite_norms(params: FiniteFamilyParams, N: int):
    """Closed-form squared norms of p_0..p_N under the normalised weight."""
    q, s4 = params.q, params.sigma4
    prods = pair_products(params.t)
    out = []
    for n in range(N + 1):
        v = (-1) ** n * (1 - q ** (n + 3) / s4) * qpoch_finite(q, q, n)
        for p in prods:
            v *= qpoch_finite(-q ** 2 / p, q, n)
        v /= (1 - q ** (2 * n + 3) / s4) * qpoch_finite(q ** 4 / s4, q, n)
        out.append(v)
    return out


def infinite_norms(params: InfiniteFamilyParams, N: int, total_mass=1):
    """(q, -q^2/t1t3; q)_n / (-q^2/t1t2, -q^2/t2t3; q)_n (t1^2/q^3)^n times the total mass."""
    q = params.q
    t1, t2, t3 = params.t
    out = []
    for n in range(N + 1):
        v = qpoch_finite(q, q, n) * qpoch_finite(-q ** 2 / (t1 * t3), q, n)
        v /= qpoch_finite(-q ** 2 / (t1 * t2), q, n) * qpoch_finite(-q ** 2 / (t2 * t3), q, n)
        out.append(v * (t1 ** 2 / q ** 3) ** n * total_mass)
    return out


def norms_from_recurrence(family: str, params, N: int, total_mass=1):
    """h_n = h_0 prod_{k=1}^{n} C_k / A_{k-1}, the norms forced by the recurrence."""
    if family == "p":
        coeffs = finite_recurrence_coeffs(params, N + 1)
    elif family == "V":
        coeffs = infinite_recurrence_coeffs(params, N + 1)
    else:
        raise InvalidArgumentError(f"unknown family {family!r}")
    out = [mp.mpmathify(total_mass)]
    for k in range(1, N + 1):
        out.append(out[-1] * coeffs.C[k] / coeffs.A[k - 1])
    return out


def _gram_from_points(values, masses, targets):
    N = len(targets) - 1
    G = [[mp.fsum(v[a] * v[b] * m for v, m in zip(values, masses)) for b in range(N + 1)] for a in range(N + 1)]
    return _report(G, targets)


def _report(G, targets):
    N = len(targets) - 1
    scale = max(abs(G[a][a]) for a in range(N + 1))
    off = mp.mpf(0)
    for a in range(N + 1):
        for b in range(N + 1):
            if a != b:
                off = max(off, abs(G[a][b]) / mp.sqrt(abs(G[a][a] * G[b][b])))
    rel = max(abs(G[a][a] / targets[a] - 1) for a in range(N + 1))
    signs = [int(mp.sign(mp.re(G[a][a]))) for a in range(N + 1)]
    return GramReport(N + 1, G, targets, off, rel, scale, signs)


def gram(
    family: str,
    params,
    N: int,
    measure: str | DiscreteMeasure = "continuous",
    ctx: PrecisionContext | None = None,
):
    """Gram matrix of the first N+1 polynomials and its comparison with the norms.

    ``max_offdiag`` is the largest |G_ab| / sqrt(|G_aa G_bb|), i.e. the
    off-diagonal residual relative to the diagonal scale.
    """
    ctx = resolve(ctx)
    if family == "p":
        if not isinstance(params, FiniteFamilyParams):
            raise InvalidParametersError("family p needs four parameters")
        if N > params.n_orth:
            raise DegreeRangeError(f"N = {N} exceeds the orthogonality range N_orth = {params.n_orth}")
        coeffs = finite_recurrence_coeffs(params, N)
        evaluate = lambda x: pn_all(x, params, N, coeffs)  # noqa: E731
        targets = finite_norms(params, N)
    elif family == "V":
        if not isinstance(params, InfiniteFamilyParams):
            raise InvalidParametersError("family V needs three parameters")
        coeffs = infinite_recurrence_coeffs(params, N)
        evaluate = lambda x: vn_all(x, params, N, coeffs)  # noqa: E731
        targets = None
    else:
        raise InvalidArgumentError(f"unknown family {family!r}")

    q = params.q
    if measure == "continuous":
        if family == "p":
            w = ContinuousWeight("normalized-w", params)
        else:
            w = ContinuousWeight("infinite-family-w", params)
        if family == "V":
            targets = infinite_norms(params, N)
        seen = {}

        def probe(x):
            seen[x] = weight_eval(w, x, ctx)
            return seen[x] * (1 + x * x) ** N

        rule = build_line_rule(probe, q, ctx)
        values, masses = [], []
        for x, c in zip(rule.nodes, rule.weights):
            values.append(evaluate(x))
            masses.append(c * seen[x])
        return _gram_from_points(values, masses, targets)

    if not isinstance(measure, DiscreteMeasure):
        raise InvalidArgumentError("measure must be 'continuous' or a DiscreteMeasure")
    if family == "V":
        if measure.attachment != "infinite":
            raise InvalidArgumentError("family V needs the infinite attachment")
        mass = totmass_infinite(params.t, q, measure.shift, ctx)
        targets = infinite_norms(params, N, mass)
    pts = measure.points(ctx, probe=lambda x: (1 + x * x) ** N)
    values = [evaluate(x) for _, x, _ in pts]
    masses = [m for _, _, m in pts]
    return _gram_from_points(values, masses, targets)


# --------------------------------------------------- divided-difference equations


def weight_dde_residual(family: str, params, x, ctx: PrecisionContext | None = None):
    """Residuals of the two divided-difference equations satisfied by the weight.

    Returns ``(d_residual, a_residual)``, each relative to the size of the
    right-hand side.
    """
    from .qoperators import CurveFunction, aw_avg, aw_dq

    q = params.q
    h = mp.sqrt(q)
    t = params.t
    x = mp.mpmathify(x)
    z = x + mp.sqrt(x * x + 1)
    sig = elementary_symmetric(t)
    prod = mp.fprod(1 + p / q ** 2 for p in pair_products(t))
    shifted = CurveFunction(lambda zz: weight_z(zz, tuple(v / h for v in t), q, True, ctx))
    base = weight_z(z, t, q, True, ctx)
    lhs_d = aw_dq(shifted, x, q, z=z) / base
    lhs_a = aw_avg(shifted, x, q, z=z) / base
    if family == "p":
        s1, s2, s3, s4 = sig
        k = (1 - s4 / q ** 4) * (1 - s4 / q ** 5) / prod
        rhs_d = 2 * q * k / (q - 1) * (2 * (1 - s4 / q ** 4) * x - s1 / q - s3 / q ** 3)
        rhs_a = h * k * ((2 * x * x + 1) * (1 + s4 / q ** 4) + x * (s3 / q ** 3 - s1 / q) + s2 / q ** 2)
    elif family == "V":
        s1, s2, s3 = sig
        rhs_d = 2 * q / ((q - 1) * prod) * (2 * x - s1 / q - s3 / q ** 3)
        rhs_a = h / prod * (2 * x * x + 1 + x * (s3 / q ** 3 - s1 / q) + s2 / q ** 2)
    else:
        raise InvalidArgumentError(f"unknown family {family!r}")
    return abs(lhs_d - rhs_d) / abs(rhs_d), abs(lhs_a - rhs_a) / abs(rhs_a)
