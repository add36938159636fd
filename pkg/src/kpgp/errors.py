"""Exception hierarchy shared by the package.

Every error carries an ``exit_code`` used by the command-line front end.
"""


class KPError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ParameterError(KPError, ValueError):
    exit_code = 2


class ConfigError(ParameterError):
    exit_code = 2


class DataError(KPError, ValueError):
    exit_code = 3


class DegenerateDesignError(DataError):
    """Repeated or unsorted knots, or a non-nested sparse-grid family."""


class InsufficientDataError(DataError):
    pass


class NumericalBreakdown(KPError, ArithmeticError):
    exit_code = 4


class ConditioningError(NumericalBreakdown):
    """A kernel-packet system is numerically degenerate or out of exp range."""


class SingularMatrixError(NumericalBreakdown):
    pass


class CollinearRegressorsError(NumericalBreakdown):
    pass


class OptimizationFailure(NumericalBreakdown):
    pass
