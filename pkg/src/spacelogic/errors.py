"""Exception types shared across the package."""

from __future__ import annotations


class SpaceLogicError(Exception):
    """Base class for all errors raised by spacelogic."""


class ParseError(SpaceLogicError, ValueError):
    """Malformed formula or model text.

    ``position`` is the character offset (formulas) or line number (models)
    where the problem was detected, when known.
    """

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at {position})"
        super().__init__(message)


class UnsupportedFragment(SpaceLogicError):
    """The formula lies outside the fragment an operation can decide."""


class BoundednessError(SpaceLogicError, ValueError):
    """A model declaration violates its declared bound."""


class BudgetExhausted(SpaceLogicError):
    """A search ran out of its configured budget before reaching a verdict."""
