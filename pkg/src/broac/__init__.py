"""Bivalent relation-object access control.

Permissions are signed relation objects between a subject (an agent, the
members of a group, or everyone) and an object (an item, the items of a
collection, or everything). Conflicts resolve by a fixed nine-level
precedence order, denies winning ties, with a closed-world default.
"""

from .errors import (
    AnonymousDisabledError,
    AuthorizationError,
    BroacError,
    CycleError,
    InvalidAbilityError,
    ScenarioSyntaxError,
    UnknownEntityError,
    UnknownTypeError,
    ValidationError,
)
from .registry import DO_ANYTHING, TypeRegistry
from .resolver import (
    Decision,
    explain,
    filter_items,
    lint_anonymous,
    resolve_global_ability,
    resolve_item_ability,
)
from .store import ALL_SPEC, GlobalPermission, Permission, Spec
from .world import ANONYMOUS, World

__version__ = "0.1.0"
