"""Exception hierarchy. The CLI maps these onto exit codes."""

from __future__ import annotations


class HLTreesError(Exception):
    exit_code = 2


class DomainError(HLTreesError, ValueError):
    """Arguments outside the domain of an operation."""


class BudgetError(HLTreesError):
    """A search would visit more candidates than the configured cap."""

    exit_code = 3

    def __init__(self, message: str, needed: int | None = None, cap: int | None = None):
        super().__init__(message)
        self.needed = needed
        self.cap = cap


class ConfigurationError(HLTreesError):
    """A bound expression needs a function that was not supplied."""


class InvariantViolation(HLTreesError, AssertionError):
    """A proven inequality failed on concrete input. Indicates a bug."""
