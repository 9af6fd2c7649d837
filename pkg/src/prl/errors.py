"""Exception hierarchy shared by all modules."""


class GeometryError(ValueError):
    """Base class for every error raised by this package."""


class NotOnHyperboloid(GeometryError):
    pass


class PointInsideBall(GeometryError):
    pass


class OutOfDomain(GeometryError):
    """Pair of Euclidean points outside the certified image of the Pogorelov map."""


class NormalizationFailure(GeometryError):
    """A vector that should be space-like could not be scaled onto de Sitter space.

    Inside the certified domain this is unreachable; seeing it means an
    internal invariant was violated.
    """


class InsufficientSamples(GeometryError):
    pass


class DomainViolation(GeometryError):
    pass


class DegenerateFace(GeometryError):
    pass


class DegenerateTriangle(GeometryError):
    pass


class Infeasible(GeometryError):
    """Packing data with no spherical realization."""


class RankDeficient(GeometryError):
    pass


class InvalidTriangulation(GeometryError):
    pass


class UnsupportedFormat(GeometryError):
    pass
