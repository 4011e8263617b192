"""Error hierarchy shared by the library and the command line."""

from __future__ import annotations


class TomographyError(Exception):
    """Base class for every error raised on purpose by this package."""


class DomainError(TomographyError, ValueError):
    """An argument is outside the domain of the operation."""


class CapacityError(TomographyError):
    """The instance is too large for an exhaustive routine."""


class BudgetExceeded(TomographyError):
    """Path enumeration went past the configured budget."""

    def __init__(self, message: str, partial_count: int) -> None:
        super().__init__(message)
        self.partial_count = partial_count


class InputError(TomographyError):
    """An input file could not be parsed."""
