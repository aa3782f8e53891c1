"""Exception hierarchy for spaceform."""


class SpaceformError(Exception):
    """Base class for all library errors."""


class DimensionMismatch(SpaceformError):
    pass


class InvalidCase(SpaceformError):
    pass


class FrameNormalizationError(SpaceformError):
    pass


class HypothesisViolated(SpaceformError):
    """A constructive-theorem precondition failed.

    ``which`` names the violated condition; ``location`` is the argmax
    grid index; ``value`` the residual there.
    """

    def __init__(self, which, location=None, value=None):
        msg = f"hypothesis violated: {which}"
        if location is not None:
            msg += f" at grid index {location} (residual {value:.3e})"
        super().__init__(msg)
        self.which = which
        self.location = location
        self.value = value


class DegenerateDelta(HypothesisViolated):
    """The twistor discriminant dropped below threshold somewhere.

    A degenerate special case of a violated construction hypothesis;
    ``location`` (grid index pair) and ``value`` identify the offending
    point.
    """

    def __init__(self, message, location=None, value=None):
        super().__init__(message)
        self.location = location
        self.value = value


class SignMismatch(SpaceformError):
    def __init__(self, message, location=None, value=None):
        super().__init__(message)
        self.location = location
        self.value = value


class IncompatiblePair(SpaceformError):
    pass


class InvalidInitialFrame(SpaceformError):
    pass


class NonFiniteState(SpaceformError):
    pass


class DegenerateFrame(SpaceformError):
    pass


class LiouvilleViolated(SpaceformError):
    pass


class DomainViolation(SpaceformError):
    pass


class NonLorentz(SpaceformError):
    pass


class TotallyGeodesicRegion(SpaceformError):
    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class ConfigError(SpaceformError):
    """Malformed CLI configuration or input file."""
