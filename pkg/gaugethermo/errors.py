"""Exception hierarchy for the gauge thermodynamics toolkit."""


class GaugeThermoError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(GaugeThermoError, ValueError):
    """Input rejected before any numerics ran."""


class NotSquare(ValidationError):
    pass


class NotHermitian(ValidationError):
    pass


class InvalidState(ValidationError):
    """Matrix is not a density matrix (trace, Hermiticity or positivity)."""


class DimensionMismatch(ValidationError):
    pass


class IndexOutOfRange(ValidationError):
    pass


class InvalidParams(ValidationError):
    pass


class InvalidJ(InvalidParams):
    """Collective spin j must be a positive half-integer."""


class InvalidPattern(ValidationError):
    pass


class NonFiniteParameter(InvalidParams):
    pass


class NonUniformGrid(ValidationError):
    pass


class InvalidGrid(ValidationError):
    """Protocol or scan grid is malformed."""


class UnknownColumn(ValidationError):
    pass


class NumericalError(GaugeThermoError, ArithmeticError):
    """A computation ran but its result cannot be trusted."""


class EigensolverFailure(NumericalError):
    pass


class InternalInconsistency(NumericalError):
    """Two routes to the same quantity disagree beyond tolerance."""


class SingularPoint(NumericalError):
    pass


class DegeneracyCrossing(NumericalError):
    """An instantaneous spectrum became degenerate along a protocol."""


class GridTooCoarse(NumericalError):
    """Eigenvectors changed too much between consecutive grid nodes."""
