"""Exception hierarchy shared by every module."""
from typing import Any, Optional


class LabError(Exception):
    """Base class for all laboratory errors."""


class InvalidStateError(LabError, ValueError):
    """Wavefunction values are not finite."""


class DegenerateStateError(LabError, ValueError):
    """Operation needs a state of nonzero norm."""


class ShapeMismatchError(LabError, ValueError):
    """Fields live on different grids."""


class InvalidProjectionError(LabError, ValueError):
    """Projection spec is not idempotent on the grid."""


class ConfigurationError(LabError, ValueError):
    """Invalid experiment or evolution configuration."""


class StabilityError(ConfigurationError):
    """Time step does not resolve the kinetic phase."""


class DomainError(LabError, ValueError):
    """Argument outside the operation's domain (wrong space, t <= 0, ...)."""


class BoxTooSmallError(LabError, ValueError):
    """Velocity cone leaks past the periodic box."""


class CapacityError(LabError, ValueError):
    """Grid too large for a dense representation."""


class BlowupError(LabError):
    """Raised where a propagated value is required but the run blew up."""

    def __init__(self, diagnostic: Any, message: Optional[str] = None):
        self.diagnostic = diagnostic
        super().__init__(message or f"Evolution blew up: {diagnostic}")
