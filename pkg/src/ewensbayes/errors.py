"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InvalidPartitionError(ValueError):
    """A partition violates its structural constraints."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class RootBracketError(RuntimeError):
    """A bracketing root search could not enclose a sign change."""


class InsufficientDrawsError(ValueError):
    """Too few retained draws for the requested summary."""
