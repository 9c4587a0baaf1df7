"""Exception hierarchy shared by every module of the package."""


class QSeriesError(Exception):
    """Base class for all errors raised by awverify."""


class InvalidArgument(QSeriesError, ValueError):
    pass


class DomainError(QSeriesError, ValueError):
    """A parameter lies outside the region where an identity or series is defined."""


class PoleError(QSeriesError, ZeroDivisionError):
    """A denominator q-shifted factorial vanishes (or is numerically zero)."""


class DivergenceError(QSeriesError, ArithmeticError):
    pass


class NoConvergence(QSeriesError, ArithmeticError):
    """Raised when a truncation or refinement budget runs out.

    ``value`` and ``err_estimate`` carry the best result reached so far,
    when one exists.
    """

    def __init__(self, message, value=None, err_estimate=None):
        super().__init__(message)
        self.value = value
        self.err_estimate = err_estimate


class ResourceError(QSeriesError, MemoryError):
    pass


class UnsupportedId(InvalidArgument):
    pass
