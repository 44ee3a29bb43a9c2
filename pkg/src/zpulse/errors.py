"""Exception types shared across the package."""


class ZPulseError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(ZPulseError):
    """Operator or state dimension does not match its declared space."""


class InvalidLabelError(ZPulseError):
    """Basis label is malformed or out of range for the given truncations."""


class InvalidOperatorError(ZPulseError):
    """Operator violates a structural requirement (e.g. not Hermitian)."""


class GridMismatchError(ZPulseError):
    """Pulse arrays are inconsistent with the time grid they claim to live on."""


class InvalidParameterError(ZPulseError):
    """Physical parameter set fails validation."""


class ConfigError(ZPulseError):
    """Run configuration file cannot be parsed or validated."""


class NonFiniteObjectiveError(ZPulseError):
    """Objective evaluated to NaN/inf; carries the offending pulse samples."""

    def __init__(self, message: str, samples=None):
        super().__init__(message)
        self.samples = samples
