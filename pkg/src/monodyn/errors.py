"""Exception types shared across the package."""

from __future__ import annotations


class MonodynError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(MonodynError):
    """Malformed graph, matrix, config, or presentation text."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ShapeError(MonodynError):
    """Matrix or vector dimensions incompatible with the operation."""


class FiringError(MonodynError):
    """Firing a stable vertex, a sink, or an unknown vertex."""


class BudgetExceededError(MonodynError):
    """Stabilization did not finish within the firing budget.

    Carries the partial configuration and odometer reached when the
    budget ran out, so callers can report how far the run got.
    """

    def __init__(self, message: str, config=None, odometer=None, fired: int = 0):
        super().__init__(message)
        self.config = config
        self.odometer = odometer
        self.fired = fired


class CapExceededError(MonodynError):
    """An enumeration would produce more elements than the configured cap."""
