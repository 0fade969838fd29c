"""Exception types shared across the package."""


class ProjGeoError(Exception):
    """Base class for every error raised by projgeo."""


class NotHermitian(ProjGeoError):
    pass


class NotSkewHermitian(ProjGeoError):
    pass


class SingularInput(ProjGeoError):
    pass


class BranchCut(ProjGeoError):
    """Principal logarithm undefined: an eigenvalue sits at -1."""


class BadRho(ProjGeoError):
    pass


class NotProjection(ProjGeoError):
    pass


class RankDeficient(ProjGeoError):
    pass


class DimensionMismatch(ProjGeoError):
    pass


class NoGenericPart(ProjGeoError):
    pass


class NoGeodesic(ProjGeoError):
    pass


class RankMismatch(ProjGeoError):
    pass


class NotMember(ProjGeoError):
    pass


class BadTrace(ProjGeoError):
    pass


class NotSubalgebra(ProjGeoError):
    pass


class TooFar(ProjGeoError):
    pass


class TooFewPoints(ProjGeoError):
    pass


class InvariantViolation(ProjGeoError):
    """A quantity that a theorem pins down failed its numerical check."""

    def __init__(self, message, computed=None, expected=None):
        super().__init__(message)
        self.computed = computed
        self.expected = expected


class InternalConsistencyError(ProjGeoError):
    """A postcondition that cannot fail under valid preconditions failed.

    Raised instead of silently returning bad data; signals a kernel bug.
    """
