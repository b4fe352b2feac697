"""Evaluate both polynomial families two ways and watch them agree.

The four-parameter polynomials p_n come from a terminating 4phi3 sum and
from their three-term recurrence; the three-parameter V_n likewise from a
3phi2.  The script prints both evaluations and their relative gap, then
shows V_n emerging from p_n as the fourth parameter shrinks.
"""
from mpmath import mp

from qaw import FiniteFamilyParams, InfiniteFamilyParams, make_context
from qaw import families as fam

ctx = make_context(40)
with ctx.activate():
    q = mp.mpf(1) / 2
    P = FiniteFamilyParams(q, ("0.3", "0.2", "0.1", "0.4"))
    V = InfiniteFamilyParams(q, (1, 2, 3))
    x = mp.mpc("0.3", "0.5")

    print("p_n(x), x = 0.3+0.5i")
    for n in range(6):
        s, r = fam.pn_series(x, P, n), fam.pn_recurrence(x, P, n)
        print(f"  n={n}  {mp.nstr(r, 20):>50}  gap {mp.nstr(abs(s - r) / abs(r), 3)}")

    print("\nV_n(x)")
    for n in range(6):
        s, r = fam.vn_series(x, V, n), fam.vn_recurrence(x, V, n)
        print(f"  n={n}  {mp.nstr(r, 20):>50}  gap {mp.nstr(abs(s - r) / abs(r), 3)}")

    print("\nnormalised p_3 as t4 -> 0, against V_3 at x = 0.4")
    out = fam.vn_as_limit_of_pn(mp.mpf("0.4"), q, 1, 2, 3, 3, [mp.mpf(10) ** -k for k in (2, 4, 8, 16)])
    for k, err in zip((2, 4, 8, 16), out["errors"]):
        print(f"  t4 = 1e-{k:<2}  |ratio - V_3| = {mp.nstr(err, 5)}")
