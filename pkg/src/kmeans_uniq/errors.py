"""Exception taxonomy shared by all modules.

Exit-code mapping used by the CLI:
    ParameterError              -> 2 (usage / parameter error)
    ShapeError, DataError       -> 3 (data / shape error)
    InfeasibleError, NumericError,
    UnsupportedError            -> 4 (numerical / infeasible error)
"""


class KmuError(Exception):
    """Base class for all package errors."""


class ParameterError(KmuError):
    """Invalid parameter value (bad r, alpha outside (0,1), ...)."""


class ShapeError(KmuError):
    """Dimension mismatch or malformed/empty data."""


class DataError(KmuError):
    """Unreadable or non-numeric input data."""


class InfeasibleError(KmuError):
    """Problem infeasible, e.g. k exceeds the number of distinct rows."""


class NumericError(KmuError):
    """Numerical failure, e.g. covariance not PSD beyond tolerance."""


class UnsupportedError(KmuError):
    """Operation outside its supported regime (model, size, ...)."""
