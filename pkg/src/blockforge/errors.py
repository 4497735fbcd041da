"""Exception types shared across the package."""

from __future__ import annotations


class BlockforgeError(Exception):
    pass


class ParseError(BlockforgeError, ValueError):
    """Malformed cycle notation or data file.

    ``position`` is a character offset for cycle strings and a 1-based line
    number for files.
    """

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at {position})"
        super().__init__(message)


class BudgetExceeded(BlockforgeError, RuntimeError):
    """A degree, orbit-size or search-node cap was hit."""


class NotTransitive(BlockforgeError, ValueError):
    pass


class ParameterInfeasible(BlockforgeError, ValueError):
    pass
