"""Exception types shared across the package."""


class HoferBilliardsError(Exception):
    """Base class for all package-specific errors."""


class DiagonalPoint(HoferBilliardsError):
    """Chord endpoints coincide (q == Q mod 1)."""


class NearGrazing(HoferBilliardsError):
    """Momentum too close to +-1 for a well-conditioned bounce solve."""

    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step


class NotStrictlyConvex(HoferBilliardsError):
    """Table has flat or concave boundary pieces; the ball map is undefined."""


class CurvatureNotPositive(HoferBilliardsError):
    """Radius of curvature dips below the positivity floor."""

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class PerturbationTooLarge(HoferBilliardsError):
    """Normal perturbation violates the C^2-smallness hypothesis."""


class InvalidWidth(HoferBilliardsError):
    """Corner profile width is nonpositive or collides with a neighbor."""


class MarkInCorner(HoferBilliardsError):
    """Marked point sits inside a corner-rounding neighborhood."""


class InconsistentChords(HoferBilliardsError):
    """Chord data admits no plane point (circles fail to intersect)."""


class BracketInverted(HoferBilliardsError):
    """Computed lower bound exceeds the upper bound; numerics bug."""


class BoundViolated(HoferBilliardsError):
    """An unconditional inequality failed; numerics bug."""


class StabilityViolated(HoferBilliardsError):
    """Barcode moved more than the functional gap allows; numerics bug."""


class ResolutionTooLarge(HoferBilliardsError):
    """Requested grid exceeds the configured cell budget."""
