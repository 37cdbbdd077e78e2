"""Exception types raised across the package."""


class SecsatError(Exception):
    """Base class for all package errors."""


class DomainError(SecsatError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DegenerateChannelError(DomainError):
    """A channel vector is too close to zero to define a null space."""


class DimensionMismatchError(SecsatError, ValueError):
    """Two vectors or bases have incompatible dimensions."""


class ConvergenceError(SecsatError, ArithmeticError):
    """A series or quadrature failed to reach its tolerance within budget."""


class ScenarioError(SecsatError, ValueError):
    """A scenario file or preset failed to parse or validate."""
