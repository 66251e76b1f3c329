"""Exception hierarchy shared by all subpackages."""


class HalfspaceError(Exception):
    """Base class for errors raised by this package."""


class DomainError(HalfspaceError, ValueError):
    """An input lies outside the mathematical domain of an operation."""


class ContractViolation(HalfspaceError, ValueError):
    """A documented precondition of an operation does not hold."""


class FocalPointError(DomainError):
    """Offset distance hits a focal point, ``t * kappa == 1``."""

    def __init__(self, focal_distance, message=None):
        self.focal_distance = focal_distance
        super().__init__(message or f"focal point at distance {focal_distance!r}")


class QuadratureError(HalfspaceError):
    """Adaptive quadrature did not reach the requested tolerance.

    ``value`` and ``error`` carry the best estimate and its error bound.
    """

    def __init__(self, message, value, error):
        super().__init__(message)
        self.value = value
        self.error = error


class ExpressionSyntaxError(HalfspaceError, ValueError):
    """Malformed holomorphic expression string."""


class OrientationError(HalfspaceError):
    """The comparison surface is not well-oriented with respect to ``M``."""


class BudgetExceeded(HalfspaceError, ValueError):
    """A simulation request exceeds the configured work budget."""


class ConfigError(HalfspaceError, ValueError):
    """A run configuration is malformed or has unknown keys."""
