"""Gram matrices of both families under their measures.

p_n is orthogonal only up to the degree where the weight's moments run
out (N_orth), both against the continuous weight on the real line and
against a discrete measure on the lattice x_n = (q^-n/a - a q^n)/2.
V_n is orthogonal for every degree on the same lattice once the masses
carry the three-parameter attachment.
"""
from mpmath import mp

from qaw import FiniteFamilyParams, InfiniteFamilyParams, make_context
from qaw import measures as meas


def show(title, g):
    print(f"{title}: size {g.size}, max off-diagonal {mp.nstr(g.max_offdiag, 3)}, "
          f"norm mismatch {mp.nstr(g.max_diag_relerr, 3)}")


ctx = make_context(40)
with ctx.activate():
    q = mp.mpf(1) / 2
    P = FiniteFamilyParams(q, ("0.3", "0.2", "0.1", "0.4"))
    print(f"finite family, N_orth = {P.n_orth}")
    val, err = meas.integrate_line(lambda x: meas.weight_eval(meas.ContinuousWeight("raw-W", P), x, ctx), q, ctx)
    print(f"  weight integral {mp.nstr(val, 25)}")
    print(f"  closed form     {mp.nstr(meas.askey_integral_closed_form(P, ctx), 25)}")
    show("  continuous weight", meas.gram("p", P, P.n_orth, "continuous", ctx))
    show("  lattice, a = 0.7", meas.gram("p", P, P.n_orth, meas.DiscreteMeasure(mp.mpf("0.7"), q, "finite", P.t), ctx))

    V = InfiniteFamilyParams(q, (1, 2, 3))
    print("\ninfinite family")
    for a in ("0.6", "0.8"):
        mu = meas.DiscreteMeasure(mp.mpf(a), q, "infinite", V.t)
        show(f"  lattice, a = {a}", meas.gram("V", V, 8, mu, ctx))
    mu = meas.DiscreteMeasure(mp.mpf("0.6"), q, "infinite", V.t, shift=q)
    show("  lattice, attachment shifted by q", meas.gram("V", V, 8, mu, ctx))
