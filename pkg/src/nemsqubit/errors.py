"""Exception hierarchy shared by all nemsqubit modules."""


class NemsqubitError(Exception):
    """Base class for all package errors."""


class ConfigError(NemsqubitError):
    """Invalid parameters, grid sizes, identifiers, or config files."""


class DomainError(NemsqubitError):
    """A value left its physical or numerical domain (probe outside the
    grid, non-finite potential, vanishing capacitor gap)."""


class ConvergenceError(NemsqubitError):
    """An iterative solver (eigensolver, quadrature, root finder) failed
    to reach its tolerance."""


class StabilityError(NemsqubitError):
    """Time propagation violated its norm-conservation bound."""


class GeometryError(NemsqubitError):
    """Plate geometry does not admit the requested configuration."""


class CalibrationError(NemsqubitError):
    """Gate calibration could not bracket its target.

    Carries the diagnostic scan table (if one was produced) in ``scan``.
    """

    def __init__(self, message, scan=None):
        super().__init__(message)
        self.scan = scan
