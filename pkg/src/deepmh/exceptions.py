"""Exception types shared across the package."""


class DeepMHError(Exception):
    """Base class for every error this package raises deliberately."""


class ValidationError(DeepMHError, ValueError):
    """Invalid argument: wrong shape, non-finite values, or bad parameter."""


class ModelFileError(DeepMHError, ValueError):
    """Malformed model or shape-model file; message points at the bad line."""


class TrainingDivergedError(DeepMHError, RuntimeError):
    """Training loss became non-finite; message names the epoch."""


class OptimizationDivergedError(DeepMHError, RuntimeError):
    """Input-space optimization hit a non-finite objective or gradient."""


class RankDeficiencyError(DeepMHError, ValueError):
    """More principal components requested than the data can support."""


class ConfigError(DeepMHError, ValueError):
    """Missing or malformed run-configuration entry."""
