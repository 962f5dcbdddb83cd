"""Exception types shared across the package."""


class SlagToricError(Exception):
    """Base class for all errors raised by slag_toric."""


class NotInSpan(SlagToricError):
    pass


class DimensionMismatch(SlagToricError):
    pass


class NotGorenstein(SlagToricError):
    pass


class InvalidTriangulation(SlagToricError):
    pass


class NotSurjective(SlagToricError):
    pass


class Inconsistent(SlagToricError):
    """The piecewise linear function of a divisor class cannot be built."""


class NotAmple(SlagToricError):
    pass


class EmptyPolytope(SlagToricError):
    pass


class NoBasis(SlagToricError):
    pass


class NotInSublattice(SlagToricError):
    pass


class InconsistentGraph(SlagToricError):
    pass


class InvalidDecomposition(SlagToricError):
    pass


class TooLarge(SlagToricError):
    pass


class DegenerateHeights(SlagToricError):
    pass


class DegenerateSpecialization(SlagToricError):
    pass


class SingularMetric(SlagToricError):
    pass


class OnDivisor(SlagToricError):
    pass


class NotConvex(SlagToricError):
    pass


class DocumentError(SlagToricError):
    """Malformed input document."""
