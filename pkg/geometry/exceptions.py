class GeometryError(Exception):
    """Base class for every error raised by the geometry library."""


class DomainError(GeometryError):
    """An elementary operation was evaluated outside its domain."""


class DimensionMismatchError(GeometryError):
    pass


class RankDeficientFrameError(GeometryError):
    pass


class SingularJacobianError(GeometryError):
    """A chart Jacobian is singular, i.e. the point is not transversal."""


class NoConvergenceError(GeometryError):
    pass


class DegenerateMetricError(GeometryError):
    """An eigenvalue of g fell inside the zero threshold."""


class ExpressionError(GeometryError):
    pass


class ExpressionSyntaxError(ExpressionError):
    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = tuple(sorted(expected))
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ''
        super().__init__(f"{message} at offset {offset}{detail}")


class UnknownVariableError(ExpressionError):
    pass


class ArityError(ExpressionError):
    pass


class UnknownPrepotentialError(ExpressionError):
    pass


class ConfigError(GeometryError):
    """A run configuration failed validation."""
