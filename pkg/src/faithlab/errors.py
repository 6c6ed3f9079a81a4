"""Exception types shared across the package."""


class FaithlabError(Exception):
    """Base class for all faithlab errors."""


class ShapeMismatch(FaithlabError):
    """An input or seed does not match the shape a graph expects."""


class ConfigError(FaithlabError):
    """A configuration value is invalid; the message names the field."""


class VerificationFailure(FaithlabError):
    """A built network failed its oracle verification."""


class DatasetIOError(FaithlabError):
    """A dataset or artifact directory is missing or corrupt."""


class FingerprintMismatch(FaithlabError):
    """Artifacts on disk were produced under a different configuration."""
