"""Precision contexts and the x <-> z coordinate maps.

Every point x of the complex plane corresponds to the two roots of
``z**2 - 2*x*z - 1 = 0``, i.e. ``2x = z - 1/z``.  Their product is -1.
Weights and quadrature use the branch ``z_pos = x + sqrt(x**2 + 1)``, which
is positive for real x; asymptotic formulas use the pair ordered by modulus.
"""
from __future__ import annotations

import contextlib
from dataclasses import dataclass, field

import mpmath
from mpmath import mp

from .errors import InvalidPrecisionError, SingularPointError

#: extra decimal digits carried internally on top of the requested precision
GUARD_DIGITS = 15


@dataclass(frozen=True)
class PrecisionContext:
    """Target precision plus the tolerances that govern truncation.

    ``series_tol`` bounds the neglected tail of infinite sums and products,
    ``quad_tol`` is the quadrature target.
    """

    digits: int
    series_tol: mpmath.mpf = field(default=None)
    quad_tol: mpmath.mpf = field(default=None)

    def __post_init__(self):
        if not isinstance(self.digits, int) or self.digits < 16:
            raise InvalidPrecisionError(f"digits must be an integer >= 16, got {self.digits!r}")
        if self.series_tol is None:
            object.__setattr__(self, "series_tol", mpmath.mpf(10) ** (-self.digits))
        if self.quad_tol is None:
            object.__setattr__(self, "quad_tol", mpmath.mpf(10) ** (-mpmath.mpf(self.digits) / 2))
        for name in ("series_tol", "quad_tol"):
            val = getattr(self, name)
            if not 0 < val < 1:
                raise InvalidPrecisionError(f"{name} must lie in (0, 1), got {val}")

    @property
    def work_dps(self) -> int:
        return self.digits + GUARD_DIGITS

    def activate(self):
        """Context manager raising mpmath's working precision for this context."""
        return mp.workdps(self.work_dps)


def make_context(digits: int) -> PrecisionContext:
    return PrecisionContext(digits)


def resolve(ctx: PrecisionContext | None) -> PrecisionContext:
    """Return ``ctx`` or a default derived from the current mpmath precision."""
    if ctx is not None:
        return ctx
    return PrecisionContext(max(16, mp.dps - GUARD_DIGITS))


@contextlib.contextmanager
def working(ctx: PrecisionContext | None):
    """Run a block at no less than the context's working precision."""
    ctx = resolve(ctx)
    with mp.workdps(max(mp.dps, ctx.work_dps)):
        yield ctx


@dataclass(frozen=True)
class ZPoint:
    """A point of the curve ``2x = z - 1/z`` with both roots.

    ``z_small`` has the smaller modulus; ``z_small * z_big == -1``.
    ``degenerate`` is set at ``x = +-i`` where the roots coincide.
    """

    x: mpmath.mpc
    z_small: mpmath.mpc
    z_big: mpmath.mpc
    z_pos: mpmath.mpc
    degenerate: bool


def zpoint_from_x(x, ctx: PrecisionContext | None = None) -> ZPoint:
    ctx = resolve(ctx)
    x = mp.mpmathify(x)
    disc = x * x + 1
    root = mp.sqrt(disc)
    z_pos = x + root
    z_neg = x - root
    if abs(z_pos) <= abs(z_neg):
        small, big = z_pos, z_neg
    else:
        small, big = z_neg, z_pos
    degenerate = abs(disc) <= ctx.series_tol * max(1, abs(x) ** 2)
    return ZPoint(x=x, z_small=small, z_big=big, z_pos=z_pos, degenerate=bool(degenerate))


def x_from_z(z):
    z = mp.mpmathify(z)
    if z == 0:
        raise SingularPointError("x_from_z is undefined at z = 0")
    return (z - 1 / z) / 2
