"""
Exceptions raised by the ISB chain laboratory.
"""

from typing import Any, Optional


class IsbError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(IsbError, ValueError):
    """Input outside the mathematical or physical domain of an operation."""


class DimensionCapError(IsbError, ValueError):
    """Truncated Hilbert space larger than the configured amplitude cap."""


class ConfigError(IsbError, ValueError):
    """Malformed or inconsistent run configuration."""


class ConvergenceError(IsbError):
    """
    An iterative solver stopped without meeting its tolerance.

    Args:
        message: Human readable description
        best: Best iterate or partial result reached before giving up
        residual: Final residual, when the solver has one
    """

    def __init__(self, message: str, best: Any = None, residual: Optional[float] = None):
        super().__init__(message)
        self.best = best
        self.residual = residual
