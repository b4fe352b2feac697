"""Exception hierarchy.

Errors split into two families so the command line can map them to exit
codes: configuration problems (bad input, unsupported parameters) and
numeric failures (poles, divergence, truncation).
"""


class QawError(Exception):
    """Base class for every error raised by the library."""


class ConfigError(QawError, ValueError):
    """The request itself is invalid."""


class NumericError(QawError, ArithmeticError):
    """The request is valid but the computation cannot be completed."""


class InvalidPrecisionError(ConfigError):
    pass


class InvalidBaseError(ConfigError):
    pass


class InvalidParametersError(ConfigError):
    pass


class InvalidArgumentError(ConfigError):
    pass


class UnsupportedParametersError(ConfigError):
    pass


class DegreeRangeError(ConfigError):
    """Requested degree exceeds the range where orthogonality holds."""


class InvalidSequenceError(ConfigError):
    pass


class PoleError(NumericError):
    pass


class DivergenceError(NumericError):
    pass


class TruncationError(NumericError):
    pass


class CoefficientSingularityError(NumericError):
    pass


class SingularPointError(NumericError, ZeroDivisionError):
    pass
