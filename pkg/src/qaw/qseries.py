"""q-Pochhammer symbols and basic hypergeometric series.

All routines work at the ambient mpmath precision; pass a
:class:`~qaw.numctx.PrecisionContext` to control truncation.  Infinite
products and nonterminating series stop once the neglected part is below
machine epsilon of the working precision, which is never looser than the
context's ``series_tol``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from mpmath import mp

from .errors import DivergenceError, InvalidArgumentError, InvalidBaseError, PoleError, TruncationError
from .numctx import PrecisionContext, resolve

MAX_TERMS = 200000


def check_base(q):
    """Validate and convert the base; q must be real with 0 < q < 1."""
    q = mp.mpmathify(q)
    if isinstance(q, mp.mpc):
        if q.imag != 0:
            raise InvalidBaseError(f"base must be real, got {q}")
        q = q.real
    if not 0 < q < 1:
        raise InvalidBaseError(f"base must lie in (0, 1), got {q}")
    return q


def _tiny(ctx):
    # truncation threshold: the stricter of series_tol and working epsilon
    return min(ctx.series_tol, mp.eps)


def qpoch_finite(a, q, n: int):
    """(a; q)_n for a nonnegative integer n."""
    if n < 0:
        raise InvalidArgumentError("negative length in (a;q)_n")
    r = mp.mpf(1)
    t = mp.mpmathify(a)
    for _ in range(n):
        r *= 1 - t
        t *= q
    return r


def qpoch_many(params: Sequence, q, n: int):
    """Product of (a; q)_n over ``params``."""
    r = mp.mpf(1)
    for a in params:
        r *= qpoch_finite(a, q, n)
    return r


def qpoch_reflected(a, q, n: int):
    """(a q^-n; q)_n computed as (q/a; q)_n (-a)^n q^(-n(n+1)/2)."""
    if n < 0:
        raise InvalidArgumentError("negative length in (a;q)_n")
    a = mp.mpmathify(a)
    if a == 0:
        raise InvalidArgumentError("reflection needs a != 0")
    return qpoch_finite(q / a, q, n) * (-a) ** n * q ** (-mp.mpf(n * (n + 1)) / 2)


def qpoch_infinite(a, q, ctx: PrecisionContext | None = None):
    """(a; q)_infinity, truncated once |a q^k| drops below the tolerance."""
    ctx = resolve(ctx)
    q = check_base(q)
    t = mp.mpmathify(a)
    if t == 0:
        return mp.mpf(1)
    stop = _tiny(ctx) * (1 - q)
    r = mp.mpf(1)
    k = 0
    while abs(t) >= stop:
        r *= 1 - t
        if r == 0:
            return r
        t *= q
        k += 1
        if k > MAX_TERMS:
            raise TruncationError("infinite product failed to converge")
    return r


def qpoch_infinite_many(params: Sequence, q, ctx: PrecisionContext | None = None):
    r = mp.mpf(1)
    for a in params:
        r *= qpoch_infinite(a, q, ctx)
    return r


def _terminating_index(a, q, tol):
    """Return m if a == q**(-m) for an integer m >= 0, else None."""
    if a == 0:
        return None
    m = mp.nint(-mp.log(abs(a)) / mp.log(q))
    if m < 0:
        return None
    m = int(m)
    if abs(a * q ** m - 1) <= tol:
        return m
    return None


@dataclass
class PhiSpec:
    """Parameters of an r-phi-s series in the standard normalisation."""

    numerator_params: list
    denominator_params: list
    argument: object
    terminating_order: int | None = field(default=None)


def phi_eval(spec: PhiSpec, q, ctx: PrecisionContext | None = None):
    r"""Sum the basic hypergeometric series described by ``spec``.

    Term k is prod (a_i;q)_k / prod (b_j;q)_k * [(-1)^k q^{k(k-1)/2}]^{1+s-r}
    * arg^k / (q;q)_k.  Terminating series are summed exactly; others must
    satisfy |arg| < 1 when r = s + 1, and are refused when r > s + 1.
    """
    ctx = resolve(ctx)
    q = check_base(q)
    ups = [mp.mpmathify(a) for a in spec.numerator_params]
    downs = [mp.mpmathify(b) for b in spec.denominator_params]
    arg = mp.mpmathify(spec.argument)
    r, s = len(ups), len(downs)
    extra = 1 + s - r
    tol = mp.mpf(10) ** (-(mp.dps // 2))

    order = spec.terminating_order
    if order is None:
        hits = [m for m in (_terminating_index(a, q, tol) for a in ups) if m is not None]
        if hits:
            order = min(hits)
    if order is None:
        if extra < 0:
            raise DivergenceError(f"{r}phi{s} with r > s + 1 diverges unless terminating")
        if extra == 0 and abs(arg) >= 1:
            raise DivergenceError("nonterminating series needs |argument| < 1")
    return _hyper_sum(ups, downs, arg, q, extra, order, ctx, well_poised=None)


def _hyper_sum(ups, downs, arg, q, extra, order, ctx, well_poised):
    eps = _tiny(ctx)
    term = mp.mpf(1)
    total = mp.mpf(1) if well_poised is None else mp.mpf(1)
    biggest = mp.mpf(1)
    qk = mp.mpf(1)  # q**k
    k = 0
    quiet = 0
    limit = MAX_TERMS if order is None else order
    while k < limit:
        num = mp.mpf(1)
        for a in ups:
            num *= 1 - a * qk
        den = 1 - qk * q
        for b in downs:
            f = 1 - b * qk
            if f == 0 or abs(f) < mp.eps ** 2:
                raise PoleError(f"denominator parameter {b} produces a vanishing factor at index {k + 1}")
            den *= f
        ratio = num / den * arg
        if extra:
            ratio *= (-qk) ** extra
        term *= ratio
        k += 1
        contrib = term
        if well_poised is not None:
            contrib = term * (1 - well_poised * qk * qk * q * q) / (1 - well_poised)
        total += contrib
        if order is None:
            mag = abs(contrib)
            biggest = max(biggest, mag)
            # ratio settles to |arg| (r = s + 1) or to 0 (damped); require
            # three consecutive negligible terms once it has settled
            settled = abs(qk) < mp.mpf("0.25")
            if settled and mag <= eps * max(abs(total), biggest * eps, eps):
                quiet += 1
                if quiet >= 3:
                    return total
            else:
                quiet = 0
            if term == 0:
                return total
        qk *= q
    if order is None:
        raise TruncationError("series failed to converge within the term budget")
    return total


def w87_eval(a, b, c, d, e, f, q, arg, ctx: PrecisionContext | None = None):
    r"""Very-well-poised 8W7(a; b, c, d, e, f; q, arg).

    Sum of (1 - a q^{2k})/(1 - a) (a,b,c,d,e,f;q)_k /
    (q, aq/b, aq/c, aq/d, aq/e, aq/f;q)_k arg^k.
    """
    ctx = resolve(ctx)
    q = check_base(q)
    a, b, c, d, e, f, arg = (mp.mpmathify(v) for v in (a, b, c, d, e, f, arg))
    tol = mp.mpf(10) ** (-(mp.dps // 2))
    hits = [m for m in (_terminating_index(v, q, tol) for v in (a, b, c, d, e, f)) if m is not None]
    order = min(hits) if hits else None
    if order is None and abs(arg) >= 1:
        raise DivergenceError("nonterminating 8W7 needs |argument| < 1")
    if a == 1:
        raise PoleError("8W7 is undefined for a = 1")
    ups = [a, b, c, d, e, f]
    downs = [a * q / v for v in (b, c, d, e, f)]
    # the (1 - a q^{2k})/(1 - a) factor is applied termwise
    return _hyper_sum(ups, downs, arg, q, 0, order, ctx, well_poised=a)


def ramanujan_Aq(zarg, q, ctx: PrecisionContext | None = None):
    r"""Ramanujan's function A_q(z) = sum_n q^{n^2} (-z)^n / (q;q)_n."""
    ctx = resolve(ctx)
    q = check_base(q)
    z = mp.mpmathify(zarg)
    eps = _tiny(ctx)
    total = mp.mpf(1)
    term = mp.mpf(1)
    biggest = mp.mpf(1)
    n = 0
    while True:
        # term_{n+1} / term_n = -z q^{2n+1} / (1 - q^{n+1})
        ratio = -z * q ** (2 * n + 1) / (1 - q ** (n + 1))
        term *= ratio
        total += term
        n += 1
        biggest = max(biggest, abs(term))
        if abs(ratio) < mp.mpf("0.5") and abs(term) <= eps * biggest:
            return total
        if n > MAX_TERMS:
            raise TruncationError("A_q series failed to converge")


def theta4(w, q, ctx: PrecisionContext | None = None, form: str = "product"):
    r"""theta_4 in the form (q^2, q/w, q w; q^2)_inf = sum (-1)^n q^{n^2} w^n."""
    ctx = resolve(ctx)
    q = check_base(q)
    w = mp.mpmathify(w)
    if form == "product":
        if w == 0:
            raise InvalidArgumentError("theta4 product form needs w != 0")
        q2 = q * q
        return qpoch_infinite_many([q2, q / w, q * w], q2, ctx)
    if form == "sum":
        if w == 0:
            raise InvalidArgumentError("theta4 bilateral sum needs w != 0")
        eps = _tiny(ctx)
        big = max(abs(w), abs(1 / w))
        N = 1
        while q ** (N * N) * big ** N >= eps:
            N += 1
        return mp.fsum((-1) ** n * q ** (n * n) * w ** n for n in range(-N, N + 1))
    raise InvalidArgumentError(f"unknown theta4 form {form!r}")
