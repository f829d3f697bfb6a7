"""Exception hierarchy shared by all modules."""


class MaxboundError(Exception):
    """Base class for every error raised by the package."""


class DomainError(MaxboundError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ShapeError(MaxboundError, ValueError):
    """Array or block shapes are inconsistent with a geometry."""


class RangeError(MaxboundError, ArithmeticError):
    """A route cannot deliver the requested accuracy for this argument range."""


class NumericError(MaxboundError, ArithmeticError):
    """A numerical procedure failed to converge.

    ``estimate`` carries the last error estimate when one is available.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class ResourceError(MaxboundError, RuntimeError):
    """A computation would exceed its declared size budget."""


class ConfigError(MaxboundError, ValueError):
    """A suite configuration is malformed or names an unknown key."""
