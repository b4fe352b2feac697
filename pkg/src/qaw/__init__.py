"""Arbitrary-precision tools for two Askey-Wilson type polynomial families.

The finite family p_n(x; t1..t4) and the infinite family V_n(x; t1, t2, t3),
their weights and discrete measures, the Askey-Wilson operators, and the
large-degree limits, all evaluated with mpmath.
"""
from .errors import ConfigError, NumericError, QawError
from .numctx import PrecisionContext, ZPoint, make_context, x_from_z, zpoint_from_x
from .families import FiniteFamilyParams, InfiniteFamilyParams

__all__ = [
    "ConfigError",
    "NumericError",
    "QawError",
    "PrecisionContext",
    "ZPoint",
    "make_context",
    "x_from_z",
    "zpoint_from_x",
    "FiniteFamilyParams",
    "InfiniteFamilyParams",
]

__version__ = "0.1.0"
