"""Exception hierarchy for wgmsqueeze."""

from typing import Any, Optional


class WgmSqueezeError(Exception):
    """Base class for every error raised by the package."""


class ParameterError(WgmSqueezeError, ValueError):
    """An input is outside the domain of the model or violates a type invariant."""


class DivergenceError(ParameterError):
    """The model was evaluated at its (sigma = 1, Omega = 0) pole."""

    def __init__(self, quantity: str):
        super().__init__(f"{quantity} diverges at sigma = 1, Omega = 0")
        self.quantity = quantity


class CorrectionError(ParameterError):
    """An electronic-noise correction cannot be applied to the measured value."""


class FitConvergenceError(WgmSqueezeError):
    """The optimizer gave up before meeting its tolerance.

    Attributes:
        best_iterate: The best FitResult reached before giving up.
    """

    def __init__(self, message: str, best_iterate: Optional[Any] = None):
        super().__init__(message)
        self.best_iterate = best_iterate


class DataParseError(WgmSqueezeError, ValueError):
    """A data file could not be parsed.

    Attributes:
        line: 1-based line number in the file.
        column: Column name (or 1-based index) that failed.
    """

    def __init__(self, message: str, line: int, column: Any):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
