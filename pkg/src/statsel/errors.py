"""Typed errors shared across the package."""


class StatselError(Exception):
    """Base class for all package errors."""


class ConfigError(StatselError):
    """Invalid configuration value (grid size, sample size, architecture)."""


class UnknownModelError(StatselError):
    """Model name or id not present in the registry."""


class DomainError(StatselError):
    """Argument outside the mathematical domain of the operation."""


class EstimationFailedError(StatselError):
    """Likelihood is -inf over the entire parameter space."""


class NoFeasibleModelError(StatselError):
    """Every candidate model is infeasible for the given sample."""


class DataFormatError(StatselError):
    """Corrupt or inconsistent dataset file."""


class ShapeError(StatselError):
    """Tensor shape mismatch between layers or inputs."""


class TrainingDivergedError(StatselError):
    """Loss became non-finite during training."""

    def __init__(self, iteration: int, message: str = ""):
        self.iteration = iteration
        super().__init__(message or f"loss diverged at iteration {iteration}")


class CheckpointError(StatselError):
    """Checkpoint files are missing, inconsistent, or unreadable."""


class InputError(StatselError):
    """User-supplied input data cannot be used."""
