"""Zeros of V_n for positive parameters.

The zeros are real, simple and interlace between consecutive degrees, so
each degree is bracketed by the previous one.  The largest zero grows by
a factor approaching q^-2 per degree.
"""
from mpmath import mp

from qaw import InfiniteFamilyParams, make_context
from qaw import families as fam
from qaw import asymptotics as asy

ctx = make_context(30)
with ctx.activate():
    q = mp.mpf(1) / 2
    V = InfiniteFamilyParams(q, (1, 1, 1))
    table = fam.vn_zero_table(V, 21)
    for n in (1, 2, 3, 4):
        print(f"V_{n} zeros: " + ", ".join(mp.nstr(z, 12) for z in table[n - 1]))
    print("\n n   x_max(n+1)/x_max(n) * q^2")
    for n in range(2, 21, 3):
        print(f"{n:>2}   {mp.nstr(max(table[n]) / max(table[n - 1]) * q * q, 12)}")

    print("\nfirst positive zeros of A_q, q = 1/2: "
          + ", ".join(mp.nstr(z, 12) for z in asy.aq_real_zeros(q, 300)[:4]))
