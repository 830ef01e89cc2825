"""Exception types shared across the toolkit."""


class ArtifactProbeError(Exception):
    """Base class for all toolkit errors."""


class DataFormatError(ArtifactProbeError):
    """An input file violates its documented format."""


class ValidationError(ArtifactProbeError):
    """A dataset, argument, or configuration value fails a semantic check."""


class ConfigError(ArtifactProbeError):
    """A run configuration is missing, unreadable, or inconsistent."""
