"""Exception types raised across the package."""


class GreenMeshError(Exception):
    """Base class for all package errors."""


class ConfigurationError(GreenMeshError, ValueError):
    """A configuration value is out of its allowed range."""


class ValidationError(GreenMeshError, ValueError):
    """A constructed object violates one of its invariants.

    ``field`` names the offending attribute when known.
    """

    def __init__(self, message: str, field: str | None = None):
        super().__init__(message)
        self.field = field


class ScenarioFormatError(GreenMeshError, ValueError):
    """A scenario file could not be parsed."""


class DimensionError(GreenMeshError, ValueError):
    """Array or vector lengths do not agree."""


class ResourceGuardError(GreenMeshError, RuntimeError):
    """A request would exceed a configured computational limit."""
