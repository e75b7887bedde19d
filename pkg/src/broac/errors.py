"""Exception hierarchy for the engine.

Validation problems (bad input, unknown names) and authorization failures
are kept apart so callers can tell schema misuse from a policy denial.
"""

from __future__ import annotations


class BroacError(Exception):
    """Base class for every engine error."""


class ValidationError(BroacError):
    """A request is malformed or conflicts with existing state."""


class CycleError(ValidationError):
    pass


class UnknownTypeError(ValidationError):
    pass


class UnknownEntityError(ValidationError):
    pass


class InvalidAbilityError(ValidationError):
    pass


class AuthorizationError(BroacError):
    """A guarded mutation was attempted by an actor lacking the required ability."""

    def __init__(self, actor: str, needed: str, target: str | None = None):
        self.actor = actor
        self.needed = needed
        self.target = target
        where = f" on {target}" if target is not None else ""
        super().__init__(f"{actor} lacks {needed!r}{where}")


class AnonymousDisabledError(BroacError):
    pass


class ScenarioSyntaxError(BroacError):
    def __init__(self, message: str, line: int, column: int = 1):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")
