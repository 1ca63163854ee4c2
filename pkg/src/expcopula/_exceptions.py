"""Exception hierarchy shared across the package."""


class ExpCopulaError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ExpCopulaError, ValueError):
    """An argument lies outside the domain of a function or parameter space."""


class ToleranceError(ExpCopulaError, ArithmeticError):
    """A numerical procedure could not reach the requested accuracy."""


class TruncationError(ToleranceError):
    """A series hit its term cap before the term tolerance was met."""


class ConvergenceError(ExpCopulaError, RuntimeError):
    """An optimizer failed to converge."""


class DataError(ExpCopulaError, ValueError):
    """Input data are malformed, degenerate or outside the model support."""
