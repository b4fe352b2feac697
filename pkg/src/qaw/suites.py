"""Named verification checks grouped into suites.

Each check evaluates one identity or limit at the working precision and
compares a scalar residual with a tolerance.  Tolerances are expressed as
``10**-(digits - k)`` so that they tighten with the requested precision;
quadrature-based checks scale with half the digits because the line rule
is certified only to ``quad_tol``.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from mpmath import mp

from . import asymptotics as asy
from . import families as fam
from . import measures as meas
from . import qoperators as ops
from .errors import InvalidArgumentError
from .numctx import PrecisionContext
from .qseries import qpoch_finite, qpoch_reflected, theta4

SUITES = ("identities", "orthogonality", "operators", "asymptotics")
ASYMPTOTIC_REGIMES = (
    "soft-edge",
    "beyond",
    "theta-bulk",
    "pointwise",
    "bulk",
    "param-scaled",
    "large-n",
    "qairy",
    "theta-degenerate",
    "w87",
)

DEFAULT_Q = "0.5"
DEFAULT_ASYMPTOTIC_Q = "0.3"
DEFAULT_FINITE_T = ("0.3", "0.2", "0.1", "0.4")
DEFAULT_INFINITE_T = ("1", "2", "3")
# small parameters keep the order-12 generating-function tail below 1e-12
GENFUN_INFINITE_T = ("0.5", "0.3", "0.2")
ALPHAS = ("0.6", "0.8")


@dataclass
class Check:
    name: str
    anchor: str
    residual: object
    tolerance: object
    passed: bool
    details: dict = field(default_factory=dict)


@dataclass
class SuiteConfig:
    """Inputs shared by the suites; ``None`` fields fall back to the defaults above."""

    q: object = None
    finite_t: tuple | None = None
    infinite_t: tuple | None = None
    n: int | None = None
    s: object = None
    x: object = None
    regime: str | None = None
    seed: int = 20240101


def _tol(ctx: PrecisionContext, k):
    return mp.mpf(10) ** (-(ctx.digits - k))


def _qtol(ctx: PrecisionContext, k):
    return mp.mpf(10) ** (-(mp.mpf(ctx.digits) / 2 - k))


def _check(name, anchor, residual, tol, details=None, passed=None):
    residual = mp.mpmathify(residual)
    if passed is None:
        passed = bool(residual <= tol)
    return Check(name, anchor, residual, mp.mpmathify(tol), bool(passed), details or {})


def _q(cfg: SuiteConfig, default):
    return mp.mpmathify(cfg.q if cfg.q is not None else default)


def _finite(cfg: SuiteConfig, q):
    return fam.FiniteFamilyParams(q, cfg.finite_t or DEFAULT_FINITE_T)


def _infinite(cfg: SuiteConfig, q):
    return fam.InfiniteFamilyParams(q, cfg.infinite_t or DEFAULT_INFINITE_T)


def _random_points(rng: random.Random, count, radius=2):
    return [mp.mpc(rng.uniform(-radius, radius), rng.uniform(-radius, radius)) for _ in range(count)]


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), mp.eps)


# ------------------------------------------------------------------ identities


def qpoch_reflection_residual(rng: random.Random, count=200):
    worst = mp.mpf(0)
    for _ in range(count):
        q = mp.mpf(rng.choice(("0.3", "0.5", "0.8")))
        n = rng.randint(0, 12)
        a = mp.mpf(rng.uniform(0.05, 3)) * rng.choice((1, -1))
        worst = max(worst, _rel(qpoch_finite(a * q ** (-n), q, n), qpoch_reflected(a, q, n)))
    return worst


def series_recurrence_residual(params, points, n_max=12):
    worst = mp.mpf(0)
    finite = isinstance(params, fam.FiniteFamilyParams)
    for x in points:
        rec = fam.pn_all(x, params, n_max) if finite else fam.vn_all(x, params, n_max)
        for n in range(n_max + 1):
            ser = fam.pn_series(x, params, n) if finite else fam.vn_series(x, params, n)
            worst = max(worst, _rel(ser, rec[n]))
    return worst


def b_symmetry_residual(params: fam.FiniteFamilyParams, n_max=8):
    base = fam.finite_recurrence_coeffs(params, n_max + 1).B
    worst = mp.mpf(0)
    for perm in itertools.permutations(params.t):
        other = fam.finite_recurrence_coeffs(fam.FiniteFamilyParams(params.q, perm), n_max + 1).B
        for n in range(n_max + 1):
            worst = max(worst, _rel(other[n], base[n]))
    return worst


def connection_residual(params_s, params_t, points, n_max=4):
    finite = isinstance(params_s, fam.FiniteFamilyParams)
    worst = mp.mpf(0)
    for n in range(n_max + 1):
        coeffs = fam.connection_p(params_s, params_t, n) if finite else fam.connection_v(params_s, params_t, n)
        for x in points:
            if finite:
                basis = fam.pn_all(x, params_t, n)
                lhs = fam.pn_recurrence(x, params_s, n)
            else:
                basis = fam.vn_all(x, params_t, n)
                lhs = fam.vn_recurrence(x, params_s, n)
            rhs = mp.fsum(c * b for c, b in zip(coeffs, basis))
            worst = max(worst, _rel(lhs, rhs))
    return worst


def connection_identity_residual(params, n_max=4):
    finite = isinstance(params, fam.FiniteFamilyParams)
    worst = mp.mpf(0)
    for n in range(n_max + 1):
        coeffs = fam.connection_p(params, params, n) if finite else fam.connection_v(params, params, n)
        for k, c in enumerate(coeffs):
            worst = max(worst, abs(c - (1 if k == n else 0)))
    return worst


def identities_suite(ctx: PrecisionContext, cfg: SuiteConfig):
    q = _q(cfg, DEFAULT_Q)
    P = _finite(cfg, q)
    V = _infinite(cfg, q)
    rng = random.Random(cfg.seed)
    pts_p = _random_points(rng, 20)
    pts_v = _random_points(rng, 20)
    out = [
        _check("qpoch-reflection", "q-shifted factorial reflection", qpoch_reflection_residual(rng), _tol(ctx, 5)),
        _check("series-recurrence-p", "finite family: series vs recurrence", series_recurrence_residual(P, pts_p), _tol(ctx, 10)),
        _check("series-recurrence-V", "infinite family: series vs recurrence", series_recurrence_residual(V, pts_v), _tol(ctx, 10)),
        _check("recurrence-B-symmetry", "finite family: B_n symmetric in t", b_symmetry_residual(P), _tol(ctx, 10)),
    ]
    xs = [mp.mpf(rng.uniform(-2, 2)) for _ in range(10)]
    t1, t2, t3, t4 = P.t
    Ps = fam.FiniteFamilyParams(q, (t1 * 2, t2 / 3, t3 * mp.mpf("1.5"), t4))
    out.append(_check("connection-p", "finite family: connection coefficients", connection_residual(Ps, P, xs), _tol(ctx, 15)))
    out.append(_check("connection-p-identity", "finite family: connection with s = t", connection_identity_residual(P), _tol(ctx, 15)))
    v1, v2, v3 = V.t
    Vs = fam.InfiniteFamilyParams(q, (v1 * mp.mpf("1.5"), v2 / 2, v3))
    out.append(_check("connection-V", "infinite family: connection coefficients", connection_residual(Vs, V, xs), _tol(ctx, 15)))
    out.append(_check("connection-V-identity", "infinite family: connection with s = t", connection_identity_residual(V), _tol(ctx, 15)))
    Vg = fam.InfiniteFamilyParams(q, GENFUN_INFINITE_T)
    T = mp.mpf("0.05")
    gx = [mp.mpf(v) for v in ("-0.8", "0.3", "1")]
    out.append(_check("genfun-p", "finite family: generating function, order 12",
                      max(fam.genfun_residual("p", P, x, T, 12) for x in gx), mp.mpf("1e-12")))
    out.append(_check("genfun-V", "infinite family: generating function, order 12",
                      max(fam.genfun_residual("V", Vg, x, T, 12) for x in gx), mp.mpf("1e-12")))
    ws = [mp.mpf("0.7"), mp.mpf("-1.3"), mp.mpc("0.4", "0.9")]
    out.append(_check("theta4-triple-product", "theta_4: product vs bilateral sum",
                      max(_rel(theta4(w, q), theta4(w, q, form="sum")) for w in ws), _tol(ctx, 5)))
    return out


# --------------------------------------------------------------- orthogonality


def orthogonality_suite(ctx: PrecisionContext, cfg: SuiteConfig):
    q = _q(cfg, DEFAULT_Q)
    P = _finite(cfg, q)
    V = _infinite(cfg, q)
    N = P.n_orth if cfg.n is None else int(cfg.n)
    out = []
    W = meas.ContinuousWeight("raw-W", P)
    if P.integrability_product < 1:
        val, err = meas.integrate_line(lambda x: meas.weight_eval(W, x, ctx), q, ctx)
        out.append(_check("askey-integral", "Askey q-beta integral", _rel(val, meas.askey_integral_closed_form(P, ctx)),
                          _qtol(ctx, 5), {"quadrature_error": err}))
        w = meas.ContinuousWeight("normalized-w", P)
        val, err = meas.integrate_line(lambda x: meas.weight_eval(w, x, ctx), q, ctx)
        out.append(_check("normalized-weight-mass", "normalised weight has mass 1", abs(val - 1), _qtol(ctx, 5)))
    g = meas.gram("p", P, N, "continuous", ctx)
    out.append(_check("gram-p-continuous-offdiag", "finite family: orthogonality, continuous weight", g.max_offdiag, _qtol(ctx, 5)))
    out.append(_check("gram-p-continuous-norms", "finite family: norms, continuous weight", g.max_diag_relerr, _qtol(ctx, 7)))
    for a in ALPHAS:
        mu = meas.DiscreteMeasure(mp.mpf(a), q, "finite", P.t)
        g = meas.gram("p", P, N, mu, ctx)
        out.append(_check(f"gram-p-discrete-{a}-offdiag", "finite family: orthogonality, attached discrete measure",
                          g.max_offdiag, _qtol(ctx, 5)))
        out.append(_check(f"gram-p-discrete-{a}-norms", "finite family: norms, attached discrete measure",
                          g.max_diag_relerr, _qtol(ctx, 7)))
    nv = 8
    for a in ALPHAS:
        mu = meas.DiscreteMeasure(mp.mpf(a), q, "infinite", V.t)
        g = meas.gram("V", V, nv, mu, ctx)
        out.append(_check(f"gram-V-discrete-{a}-offdiag", "infinite family: orthogonality, attached discrete measure",
                          g.max_offdiag, _tol(ctx, 25)))
        out.append(_check(f"gram-V-discrete-{a}-norms", "infinite family: norms times total mass",
                          g.max_diag_relerr, _tol(ctx, 30), {"diagonal_signs": g.diagonal_signs}))
        total = meas.discrete_sum(lambda x: 1, mu, ctx)
        out.append(_check(f"totmass-V-{a}", "infinite family: total mass of the attached measure",
                          _rel(total, meas.totmass_infinite(V.t, q, 1, ctx)), _tol(ctx, 20)))
    return out


# -------------------------------------------------------------------- operators


def operators_suite(ctx: PrecisionContext, cfg: SuiteConfig):
    q = _q(cfg, DEFAULT_Q)
    P = _finite(cfg, q)
    V = _infinite(cfg, q)
    xs = [mp.mpf(v) for v in ("0.3", "-1.7", "2.5")]
    tol = _tol(ctx, 15)
    out = []
    worst = max(ops.dq_basis_identity(mp.mpf("0.7"), q, k, x).relative for k in range(1, 5) for x in xs)
    out.append(_check("dq-basis", "D_q on the (-a/z, az; q)_k basis", worst, tol))
    for params, tag in ((P, "p"), (V, "V")):
        for name, fn, anchor in (
            ("lowering", ops.lowering_residual, "lowering operator"),
            ("raising", ops.raising_residual, "raising operator"),
            ("sturm-liouville", ops.sturm_liouville_residual, "q-Sturm-Liouville equation"),
        ):
            worst = max(fn(params, n, xs).relative for n in range(1, 5))
            out.append(_check(f"{name}-{tag}", f"{'finite' if tag == 'p' else 'infinite'} family: {anchor}", worst, tol))
        worst = max(ops.rodrigues_residual(params, n, xs).relative for n in range(1, 4))
        out.append(_check(f"rodrigues-{tag}", f"{'finite' if tag == 'p' else 'infinite'} family: Rodrigues formula",
                          worst, _tol(ctx, 20)))
        d_res, a_res = zip(*(meas.weight_dde_residual(tag, params, x, ctx) for x in xs))
        out.append(_check(f"weight-dde-{tag}", f"{'finite' if tag == 'p' else 'infinite'} family: weight difference equations",
                          max(d_res + a_res), tol))
    f = ops.CurveFunction.from_x(lambda x: x ** 3 - 2 * x, degree=3)
    g = ops.CurveFunction.from_x(lambda x: x ** 2 + 1, degree=2)
    out.append(_check("product-rule", "product rule for D_q", ops.product_rule_residual(f, g, xs, q).relative, tol))
    wv = ops.CurveFunction(lambda z: meas.weight_z(z, V.t, q, True, ctx) * fam.vn_recurrence(ops.x_from_z(z), V, 1))
    pv = ops.CurveFunction.from_x(lambda x: fam.vn_recurrence(x, V, 2), degree=2)
    for a in ALPHAS:
        rep = ops.discrete_integration_by_parts_residual(wv, pv, mp.mpf(a), q, ctx)
        out.append(_check(f"discrete-integration-by-parts-{a}", "discrete integration by parts", rep.relative, tol))
    return out


# ------------------------------------------------------------------ asymptotics


def _decay_check(name, anchor, rep: asy.ConvergenceReport, n_early, n_late, factor="1e-3"):
    ratio = rep.error_at(n_late) / rep.error_at(n_early) if rep.error_at(n_early) else mp.mpf(0)
    passed = bool(ratio < mp.mpf(factor) and rep.rate > 0)
    return _check(name, anchor, ratio, mp.mpf(factor), _convergence_details(rep), passed)


def _eventually_decreasing(rep: asy.ConvergenceReport):
    tail = rep.errors[len(rep.errors) // 2:]
    return all(b <= a for a, b in zip(tail, tail[1:]))


def _convergence_check(name, anchor, rep: asy.ConvergenceReport):
    """Pass when the errors decrease over the last half of the n-list and the fitted rate is positive."""
    first = rep.errors[len(rep.errors) // 2]
    ratio = rep.errors[-1] / first if first else mp.mpf(0)
    passed = bool(_eventually_decreasing(rep) and rep.rate > 0)
    return _check(name, anchor, ratio, mp.mpf(1), _convergence_details(rep), passed)


def _convergence_details(rep: asy.ConvergenceReport):
    return {"n": rep.n_values, "errors": rep.errors, "rate": rep.rate}


def asymptotics_suite(ctx: PrecisionContext, cfg: SuiteConfig):
    q = _q(cfg, DEFAULT_ASYMPTOTIC_Q)
    V = _infinite(cfg, q)
    P = _finite(cfg, q)
    s = mp.mpmathify(cfg.s if cfg.s is not None else "0.7")
    wanted = ASYMPTOTIC_REGIMES if cfg.regime is None else (cfg.regime,)
    if cfg.regime is not None and cfg.regime not in ASYMPTOTIC_REGIMES:
        raise InvalidArgumentError(f"unknown regime {cfg.regime!r}; choose from {', '.join(ASYMPTOTIC_REGIMES)}")
    ns = [15, 20, 25, 30]
    even = [16, 20, 26, 30]
    out = []
    if "soft-edge" in wanted:
        out.append(_decay_check("soft-edge-c2", "Plancherel-Rotach, c = 2", asy.soft_edge_c2(s, V, ns), 15, 30))
    if "beyond" in wanted:
        out.append(_decay_check("beyond-edge-c3", "Plancherel-Rotach, c = 3", asy.beyond_edge(s, V, 3, ns), 15, 30))
    if "theta-bulk" in wanted:
        out.append(_decay_check("theta-bulk-c1", "Plancherel-Rotach, c = 1, even n", asy.theta_bulk(s, V, 1, even), 16, 30))
    if "pointwise" in wanted:
        x = mp.mpmathify(cfg.x if cfg.x is not None else "0.4")
        out.append(_decay_check("pointwise-2phi2", "pointwise limit of V_n", asy.pointwise_limit_vn(x, V, ns), 15, 30))
    if "bulk" in wanted:
        out.append(_decay_check("bulk-p", "finite family: large-n limit at fixed x", asy.bulk_pn(mp.mpf(3), P, ns), 15, 30))
    if "param-scaled" in wanted:
        rep = asy.param_scaled_limit(mp.mpf("0.8"), V, mp.mpf("0.5"), ns)
        out.append(_decay_check("param-scaled", "parameter-scaled limit of V_n", rep, 15, 30))
    if "large-n" in wanted:
        rep = asy.finite_family_largeN(mp.mpf("0.3"), P.t, q, ns)
        out.append(_decay_check("large-n-p", "finite family: t3, t4 scaled by q^n", rep, 15, 30))
    if "qairy" in wanted:
        expo = tuple(mp.mpf(v) for v in ("1.5", "0.5", "0.5", "0.5"))
        rep = asy.qairy_regime(mp.mpf("0.5"), V.t, expo, q, list(range(4, 31, 2)))
        bound = rep.extra["bound"] + mp.mpf("0.1")
        details = _convergence_details(rep)
        details["bound"] = rep.extra["bound"]
        out.append(_check("qairy-rate", "q-Airy regime: fitted rate within bound", rep.rate, bound, details,
                          bool(0 < rep.rate <= bound)))
    if "theta-degenerate" in wanted:
        rep = asy.theta_degenerate(mp.mpf("0.9"), mp.mpf("0.5"), q, list(range(4, 31, 2)))
        chk = _convergence_check("theta-degenerate", "theta regime: limit theta_4(w; q^1/2)", rep)
        chk.details["errors_against_one"] = rep.extra["errors_against_one"]
        out.append(chk)
    if "w87" in wanted:
        x = mp.mpf("0.3")
        Pw = fam.FiniteFamilyParams(q, P.t)
        res = _rel(asy.pn_w87(x, Pw, 3), fam.pn_recurrence(x, Pw, 3))
        out.append(_check("w87-representation", "finite family: 8W7 representation, n = 3", res, _tol(ctx, 15)))
    return out


SUITE_FUNCTIONS = {
    "identities": identities_suite,
    "orthogonality": orthogonality_suite,
    "operators": operators_suite,
    "asymptotics": asymptotics_suite,
}


def run_suite(name: str, ctx: PrecisionContext, cfg: SuiteConfig | None = None):
    """Run one suite (or ``"all"``) and return its checks sorted by name."""
    cfg = cfg or SuiteConfig()
    if name == "all":
        names = SUITES
    elif name in SUITE_FUNCTIONS:
        names = (name,)
    else:
        raise InvalidArgumentError(f"unknown suite {name!r}")
    checks = []
    with ctx.activate():
        for n in names:
            checks.extend(SUITE_FUNCTIONS[n](ctx, cfg))
    return sorted(checks, key=lambda c: c.name)
