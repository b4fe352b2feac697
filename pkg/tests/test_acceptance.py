"""Acceptance criteria at their stated tolerances (digits = 50).

Each test records one line through ``acceptance_log``; the lines are
printed in the terminal summary.
"""
import random

import pytest
from mpmath import mp

from qaw import asymptotics as asy
from qaw import families as fam
from qaw import measures as meas
from qaw import qoperators as ops
from qaw.cli import main
from qaw.qseries import qpoch_finite, qpoch_reflected
from qaw.suites import (
    b_symmetry_residual,
    connection_identity_residual,
    connection_residual,
    series_recurrence_residual,
)

Q = mp.mpf(1) / 2


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


def _fmt(v):
    return mp.nstr(v, 3)


def test_criterion_01_qpoch_reflection(ctx50, acceptance_log):
    rng = random.Random(1)
    worst = mp.mpf(0)
    for _ in range(200):
        q = mp.mpf(rng.choice(("0.3", "0.5", "0.8")))
        n = rng.randint(0, 12)
        a = mp.mpc(rng.uniform(-3, 3), rng.uniform(-3, 3))
        worst = max(worst, _rel(qpoch_finite(a * q ** (-n), q, n), qpoch_reflected(a, q, n)))
    ok = worst < mp.mpf("1e-45")
    acceptance_log("1", ok, f"q-Pochhammer reflection, 200 samples: max rel err {_fmt(worst)} (< 1e-45)")
    assert ok


ASKEY_SETS = [
    ("0.5", ("0.3", "0.2", "0.1", "0.4")),
    ("0.8", ("0.1", "0.2", "-0.3", "0.05")),
    ("0.3", ("0.01", "0.02", "0.02", "0.01")),
    ("0.5", ("1", "0.5", "0.2", "0.1")),
    ("0.6", (mp.mpc("0.5", "0.3"), mp.mpc("0.5", "-0.3"), "0.2", "0.4")),
]


@pytest.mark.slow
def test_criterion_02_askey_integral(ctx50, acceptance_log):
    worst_int, worst_mass = mp.mpf(0), mp.mpf(0)
    for q, t in ASKEY_SETS:
        P = fam.FiniteFamilyParams(q, t)
        assert abs(P.sigma4) < P.q ** 3
        raw = meas.ContinuousWeight("raw-W", P)
        val, _ = meas.integrate_line(lambda x: meas.weight_eval(raw, x, ctx50), P.q, ctx50)
        worst_int = max(worst_int, _rel(val, meas.askey_integral_closed_form(P, ctx50)))
        norm = meas.ContinuousWeight("normalized-w", P)
        val, _ = meas.integrate_line(lambda x: meas.weight_eval(norm, x, ctx50), P.q, ctx50)
        worst_mass = max(worst_mass, abs(val - 1))
    ok = worst_int < mp.mpf("1e-20") and worst_mass < mp.mpf("1e-20")
    acceptance_log("2", ok, f"Askey integral, 5 sets: rel err {_fmt(worst_int)}, |mass - 1| {_fmt(worst_mass)} (< 1e-20)")
    assert ok


@pytest.mark.slow
def test_criterion_03_finite_orthogonality(ctx50, acceptance_log):
    P = fam.FiniteFamilyParams(Q, ("0.3", "0.2", "0.1", "0.4"))
    N = P.n_orth
    reports = {"continuous": meas.gram("p", P, N, "continuous", ctx50)}
    for a in ("0.6", "0.8"):
        reports[f"alpha={a}"] = meas.gram("p", P, N, meas.DiscreteMeasure(mp.mpf(a), Q, "finite", P.t), ctx50)
    off = max(r.max_offdiag for r in reports.values())
    diag = max(r.max_diag_relerr for r in reports.values())
    ok = off < mp.mpf("1e-20") and diag < mp.mpf("1e-18")
    acceptance_log("3", ok, f"finite family N = N_orth = {N}: offdiag {_fmt(off)} (< 1e-20), norms {_fmt(diag)} (< 1e-18)")
    assert ok


def test_criterion_04_infinite_orthogonality(ctx50, acceptance_log):
    V = fam.InfiniteFamilyParams(Q, (1, 2, 3))
    off, diag, mass = mp.mpf(0), mp.mpf(0), mp.mpf(0)
    for a in ("0.6", "0.8"):
        mu = meas.DiscreteMeasure(mp.mpf(a), Q, "infinite", V.t)
        g = meas.gram("V", V, 8, mu, ctx50)
        off, diag = max(off, g.max_offdiag), max(diag, g.max_diag_relerr)
        total = meas.discrete_sum(lambda x: 1, mu, ctx50)
        mass = max(mass, _rel(total, meas.totmass_infinite(V.t, Q, 1, ctx50)))
    ok = off < mp.mpf("1e-25") and diag < mp.mpf("1e-20") and mass < mp.mpf("1e-30")
    acceptance_log("4", ok, f"infinite family N = 8: offdiag {_fmt(off)} (< 1e-25), norms {_fmt(diag)} (< 1e-20), total mass {_fmt(mass)} (< 1e-30)")
    assert ok


def test_criterion_05_series_recurrence(ctx50, acceptance_log):
    rng = random.Random(5)
    pts = [mp.mpc(rng.uniform(-2, 2), rng.uniform(-2, 2)) for _ in range(40)]
    P = fam.FiniteFamilyParams(Q, ("0.3", "0.2", "0.1", "0.4"))
    V = fam.InfiniteFamilyParams(Q, (1, 2, 3))
    rp = series_recurrence_residual(P, pts[:20])
    rv = series_recurrence_residual(V, pts[20:])
    rb = b_symmetry_residual(P)
    ok = max(rp, rv, rb) < mp.mpf("1e-40")
    acceptance_log("5", ok, f"series vs recurrence p {_fmt(rp)}, V {_fmt(rv)}; B_n symmetry {_fmt(rb)} (< 1e-40)")
    assert ok


def test_criterion_06_operator_identities(ctx50, acceptance_log):
    P = fam.FiniteFamilyParams(Q, ("0.3", "0.2", "0.1", "0.4"))
    V = fam.InfiniteFamilyParams(Q, (1, 2, 3))
    xs = [mp.mpf(v) for v in ("0.3", "-1.7", "2.5")]
    worst = mp.mpf(0)
    for params in (P, V):
        for n in range(1, 5):
            for fn in (ops.lowering_residual, ops.raising_residual, ops.sturm_liouville_residual):
                worst = max(worst, fn(params, n, xs).relative)
    rod = max(ops.rodrigues_residual(p, n, xs).relative for p in (P, V) for n in range(1, 4))
    f = ops.CurveFunction.from_x(lambda x: x ** 3 - 2 * x, degree=3)
    g = ops.CurveFunction.from_x(lambda x: x ** 2 + 1, degree=2)
    worst = max(worst, ops.product_rule_residual(f, g, xs, Q).relative)
    wv = ops.CurveFunction(lambda z: meas.weight_z(z, V.t, Q) * fam.vn_recurrence(ops.x_from_z(z), V, 1))
    pv = ops.CurveFunction.from_x(lambda x: fam.vn_recurrence(x, V, 2), degree=2)
    for a in ("0.6", "0.8"):
        worst = max(worst, ops.discrete_integration_by_parts_residual(wv, pv, mp.mpf(a), Q).relative)
    ok = worst < mp.mpf("1e-35") and rod < mp.mpf("1e-30")
    acceptance_log("6", ok, f"operators max rel residual {_fmt(worst)} (< 1e-35), Rodrigues {_fmt(rod)} (< 1e-30)")
    assert ok


def test_criterion_07_connection(ctx50, acceptance_log):
    rng = random.Random(7)
    xs = [mp.mpf(rng.uniform(-2, 2)) for _ in range(10)]
    P = fam.FiniteFamilyParams(Q, ("0.3", "0.2", "0.1", "0.4"))
    Ps = fam.FiniteFamilyParams(Q, ("0.6", "0.05", "0.15", "0.4"))
    V = fam.InfiniteFamilyParams(Q, (1, 2, 3))
    Vs = fam.InfiniteFamilyParams(Q, ("1.5", "0.7", 3))
    r = max(connection_residual(Ps, P, xs), connection_residual(Vs, V, xs))
    ident = max(connection_identity_residual(P), connection_identity_residual(V))
    ok = r < mp.mpf("1e-35") and ident < mp.mpf("1e-35")
    acceptance_log("7", ok, f"connection expansions {_fmt(r)}, s = t identity {_fmt(ident)} (< 1e-35)")
    assert ok


def test_criterion_08_generating_functions(ctx50, acceptance_log):
    P = fam.FiniteFamilyParams(Q, ("0.3", "0.2", "0.1", "0.4"))
    V = fam.InfiniteFamilyParams(Q, ("0.5", "0.3", "0.2"))
    Ts = [mp.mpf("0.05") * mp.expjpi(mp.mpf(k) / 4) for k in range(8)]
    xs = [mp.mpf(v) for v in ("-1", "-0.4", "0.3", "1")]
    rp = max(fam.genfun_residual("p", P, x, T, 12) for x in xs for T in Ts)
    rv = max(fam.genfun_residual("V", V, x, T, 12) for x in xs for T in Ts)
    ok = max(rp, rv) < mp.mpf("1e-12")
    acceptance_log("8", ok, f"generating functions K = 12, |t| = 0.05: p {_fmt(rp)}, V {_fmt(rv)} (< 1e-12)")
    assert ok


# criterion 9: q = 0.3 (see the decisions ledger for the choice of q)
Q9 = mp.mpf("0.3")


def _v9():
    return fam.InfiniteFamilyParams(Q9, (1, 2, 3))


def _drop(rep, early, late):
    return rep.error_at(late) / rep.error_at(early)


@pytest.mark.parametrize(
    "clause",
    ["soft-edge-c2", "beyond-c3", "theta-bulk-c1", "pointwise"],
)
def test_criterion_09_plancherel_rotach(ctx50, acceptance_log, clause):
    V = _v9()
    s = mp.mpf("0.7")
    if clause == "soft-edge-c2":
        rep, early = asy.soft_edge_c2(s, V, [15, 20, 25, 30]), 15
    elif clause == "beyond-c3":
        rep, early = asy.beyond_edge(s, V, 3, [15, 20, 25, 30]), 15
    elif clause == "theta-bulk-c1":
        rep, early = asy.theta_bulk(s, V, 1, [16, 20, 26, 30]), 16
    else:
        rep, early = asy.pointwise_limit_vn(mp.mpf("0.4"), V, [15, 20, 25, 30]), 15
    drop = _drop(rep, early, 30)
    ok = drop < mp.mpf("1e-3") and rep.rate > 0
    acceptance_log(f"9.{clause}", ok, f"err(30)/err({early}) = {_fmt(drop)} (< 1e-3), rate {_fmt(rep.rate)}")
    assert ok


def test_criterion_09_qairy(ctx50, acceptance_log):
    expo = tuple(mp.mpf(v) for v in ("1.5", "0.5", "0.5", "0.5"))
    rep = asy.qairy_regime(mp.mpf("0.5"), (1, 2, 3), expo, Q9, list(range(4, 31, 2)))
    bound = rep.extra["bound"]
    ok = 0 < rep.rate <= bound + mp.mpf("0.1")
    acceptance_log("9.qairy", ok, f"fitted rate {_fmt(rep.rate)} in (0, {_fmt(bound + mp.mpf('0.1'))}]")
    assert ok


def test_criterion_09_theta(ctx50, acceptance_log):
    rep = asy.theta_degenerate(mp.mpf("0.9"), mp.mpf("0.5"), Q9, list(range(4, 31, 2)))
    tail = rep.errors[len(rep.errors) // 2:]
    decreasing = all(b <= a for a, b in zip(tail, tail[1:]))
    ok = decreasing and rep.rate > 0
    acceptance_log("9.theta", ok, f"distance to theta_4(w; q^1/2): err(16) = {_fmt(rep.error_at(16))}, err(30) = {_fmt(rep.error_at(30))}, decreasing {decreasing}, rate {_fmt(rep.rate)}")
    assert ok


def test_criterion_09_w87(ctx50, acceptance_log):
    P = fam.FiniteFamilyParams(Q, ("0.3", "0.2", "0.1", "0.4"))
    worst = max(_rel(asy.pn_w87(x, P, 3), fam.pn_recurrence(x, P, 3)) for x in (mp.mpf("0.3"), mp.mpf("-1.1")))
    ok = worst < mp.mpf("1e-35")
    acceptance_log("9.w87", ok, f"8W7 representation at n = 3: {_fmt(worst)} (< 1e-35)")
    assert ok


def test_criterion_10_zeros(ctx50, acceptance_log):
    V = fam.InfiniteFamilyParams(Q, (1, 1, 1))
    table = fam.vn_zero_table(V, 21)
    counts = all(len(table[n - 1]) == n for n in range(1, 13))
    inter = all(
        table[n - 1][i] < table[n - 2][i] < table[n - 1][i + 1] for n in range(2, 13) for i in range(n - 1)
    )
    ratio = max(table[20]) / max(table[19])
    dev = abs(ratio * Q * Q - 1)
    ok = counts and inter and dev < mp.mpf("0.05")
    acceptance_log("10", ok, f"zero counts {counts}, interlacing {inter}, x_max(21)/x_max(20) q^2 - 1 = {_fmt(dev)} (< 0.05)")
    assert ok


def test_criterion_11_determinism(tmp_path, acceptance_log):
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.json"
        code = main(["verify", "identities", "--digits", "30", "--no-timestamp", "--out", str(path)])
        assert code == 0
        outs.append(path.read_bytes())
    code = main(["verify", "asymptotics", "--digits", "30", "--no-timestamp", "--regime", "soft-edge", "--out", str(tmp_path / "a.json")])
    same = outs[0] == outs[1]
    acceptance_log("11", same, f"two identical suite runs byte-identical: {same}")
    assert same and code == 0
