"""Exception types shared across the package."""


class TruncllError(ValueError):
    """Base class for all errors raised by this package."""


class InvalidParameterError(TruncllError):
    """Distribution or configuration parameters violate their invariants."""


class DomainError(TruncllError):
    """An argument lies outside the mathematical domain of an operation."""


class ConvergenceError(TruncllError):
    """A root search failed to bracket or converge; carries diagnostic detail."""
