"""
Error hierarchy. Everything derives from ValueError so callers that only
know about ValueError keep working.
"""


class GhostLabError(ValueError):
    """Base class for all ghostlab errors."""


class DomainError(GhostLabError):
    """A numeric argument is outside the domain of the operation."""


class FormatError(GhostLabError):
    """A GTF file is malformed."""


class IngestionError(GhostLabError):
    """External frames could not be ingested."""


class ShapeError(GhostLabError):
    """Extents or dims do not agree."""


class DegenerateFitError(GhostLabError):
    """A data-dependent normalizer cannot be fitted on the given counts."""


class NumericError(GhostLabError):
    """A non-finite value showed up during a computation."""

    def __init__(self, message: str, parameter: str | None = None):
        super().__init__(message if parameter is None else f"{message} (parameter '{parameter}')")
        self.parameter = parameter


class ConfigError(GhostLabError):
    """Invalid configuration, unknown names or missing inputs."""


class OutputError(GhostLabError):
    """An output location cannot be written."""
