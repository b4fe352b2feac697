"""Large-degree behaviour of V_n in the scaling regimes.

Each regime rescales V_n at a degree-dependent point and compares with a
limit built from Ramanujan's A_q, a theta product or a 2phi2.  The table
lists the error at each n and the fitted geometric rate in units of log q.
The last block shows the theta regime, where the scaled values settle on
one rather than on theta_4(w; q^1/2).
"""
from mpmath import mp

from qaw import InfiniteFamilyParams, make_context
from qaw import asymptotics as asy

ctx = make_context(40)
with ctx.activate():
    q = mp.mpf("0.3")
    V = InfiniteFamilyParams(q, (1, 2, 3))
    s = mp.mpf("0.7")
    ns = [15, 20, 25, 30]
    reports = {
        "soft edge, c = 2": asy.soft_edge_c2(s, V, ns),
        "beyond the edge, c = 3": asy.beyond_edge(s, V, 3, ns),
        "theta bulk, c = 1": asy.theta_bulk(s, V, 1, [16, 20, 26, 30]),
        "fixed x = 0.4": asy.pointwise_limit_vn(mp.mpf("0.4"), V, ns),
    }
    for name, rep in reports.items():
        errs = "  ".join(f"n={n}: {mp.nstr(e, 3)}" for n, e in zip(rep.n_values, rep.errors))
        print(f"{name:<24} {errs}   rate {mp.nstr(rep.rate, 4)}")

    expo = tuple(mp.mpf(v) for v in ("1.5", "0.5", "0.5", "0.5"))
    rep = asy.qairy_regime(mp.mpf("0.5"), V.t, expo, q, list(range(4, 31, 2)))
    print(f"\nq-Airy regime: fitted rate {mp.nstr(rep.rate, 4)}, bound {rep.extra['bound']}")

    rep = asy.theta_degenerate(mp.mpf("0.9"), mp.mpf("0.5"), q, list(range(4, 31, 2)), rotated=True)
    print(f"\ntheta regime, target theta_4 = {mp.nstr(rep.target, 10)}")
    for n, v, e in zip(rep.n_values, rep.values, rep.extra["errors_against_one"]):
        print(f"  n={n:>2}  Re value {mp.nstr(mp.re(v), 12):>16}   Im value {mp.nstr(mp.im(v), 3):>10}   |value - 1| {mp.nstr(e, 3)}")
