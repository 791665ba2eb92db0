"""Exception types raised across the package."""

from __future__ import annotations


class DimensionError(ValueError):
    """Operand shapes are incompatible with the requested operation."""


class StabilityError(ValueError):
    """A drift matrix has an eigenvalue with non-negative real part."""


class StructureError(ValueError):
    """Malformed MPO or triangular site data (bond mismatch, bad block layout)."""


class SizeGuardError(ValueError):
    """A dense representation was requested for a system that is too large."""


class DegenerateInputError(ValueError):
    """The input has zero norm where a normalisable object is required."""


class CanonicalFormError(RuntimeError):
    """Schmidt values were requested from an MPO whose spectra are stale."""


class NormalizationError(ValueError):
    """A density-matrix factor does not have unit trace."""


class ObservableParseError(ValueError):
    """An observable expression could not be parsed.

    Attributes:
        position: zero-based character offset of the offending token, or None.
    """

    def __init__(self, message: str, position: int | None = None) -> None:
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class ConfigError(ValueError):
    """Invalid experiment configuration; the message carries the config path."""


class NumericalAbort(RuntimeError):
    """Evolution produced NaN/inf values and was stopped."""

    def __init__(self, message: str, time: float | None = None, checkpoint: str | None = None) -> None:
        super().__init__(message)
        self.time = time
        self.checkpoint = checkpoint
