"""Exception types raised by the calibration and sensing pipeline."""


class SensingError(Exception):
    """Base class for pipeline failures that a trial runner may record and skip."""


class ConfigurationError(SensingError):
    """A configuration value is invalid or inconsistent (aliasing delays, bad IFFT size, ...)."""


class ReferenceNotFoundError(SensingError):
    """No delay tap matched the known reference direction within tolerance.

    Usually indicates reference-path blockage or a mis-configured scene.
    """


class WeakReferenceError(SensingError):
    """The matched reference tap is too weak above the CIR floor to calibrate against."""


class GeometryError(SensingError):
    """A range/angle pair does not intersect the bistatic ellipse in front of the receiver."""


class ReferenceStabilityWarning(UserWarning):
    """Reference-tap magnitude varies over symbols; a dynamic path may overlap the tap."""
