"""Exception hierarchy shared by all modules."""


class LineContError(Exception):
    """Base class for every error raised by linecont."""


class CurveError(LineContError):
    pass


class CurvatureViolation(CurveError):
    pass


class NotInterior(CurveError):
    """The origin is not strictly inside the curve (support function not positive)."""


class SeriesFitError(CurveError):
    pass


class DegenerateTangency(CurveError):
    """More than two tangent lines pass through a point."""


class OnCurveError(LineContError):
    pass


class TooCloseToContour(LineContError):
    pass


class BoundaryBand(LineContError):
    def __init__(self, message, nearest_theta=None):
        super().__init__(message)
        self.nearest_theta = nearest_theta


class InadmissibleC(LineContError):
    pass


class BranchTrackingError(LineContError):
    pass


class GeometryError(LineContError):
    """A geometric fact that should hold for a valid curve was not observed numerically."""


class RegionError(LineContError):
    pass


class DegenerateAnnulus(LineContError):
    pass


class UnreachablePoint(LineContError):
    pass


class IllConditionedFit(LineContError):
    pass


class InsufficientSamples(LineContError):
    pass


class SpecError(LineContError, ValueError):
    """A curve or field spec string could not be parsed."""
