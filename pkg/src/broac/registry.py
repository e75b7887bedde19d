"""Item-type hierarchy and ability vocabulary.

Types form a multiple-inheritance DAG rooted at ``Item``. Each type declares
the item abilities it introduces; a type's effective abilities are the union
over its ancestry. Every registered type ``T`` contributes the global ability
``create T``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import CycleError, UnknownTypeError, ValidationError

DO_ANYTHING = "do_anything"
ROOT = "Item"

ITEM_ABILITIES = (
    DO_ANYTHING,
    "comment_on",
    "delete",
    "view Item.name",
    "view Item.description",
    "view Item.creator",
    "view Item.created_at",
    "edit Item.name",
    "edit Item.description",
)

# The core spine; remaining leaves come from the bootstrap scenario file.
BUILTIN_TYPES: tuple[tuple[str, tuple[str, ...], tuple[str, ...]], ...] = (
    ("Agent", (ROOT,), (
        "add_contact_method",
        "add_authentication_method",
        "login_as",
        "view Agent.last_online_at",
    )),
    ("Person", ("Agent",), (
        "view Person.first_name",
        "view Person.middle_names",
        "view Person.last_name",
        "view Person.suffix",
        "edit Person.first_name",
        "edit Person.middle_names",
        "edit Person.last_name",
        "edit Person.suffix",
    )),
    ("Collection", (ROOT,), ("modify_membership", "add_self", "remove_self")),
    ("Group", ("Collection",), ()),
    ("Document", (ROOT,), ()),
    ("TextDocument", ("Document",), (
        "view TextDocument.body",
        "edit TextDocument.body",
        "add_transclusion",
    )),
)


def create_ability(type_name: str) -> str:
    return f"create {type_name}"


@dataclass(frozen=True)
class ItemType:
    name: str
    parents: tuple[str, ...]
    own_item_abilities: frozenset[str] = field(default_factory=frozenset)
    own_global_abilities: frozenset[str] = field(default_factory=frozenset)


class TypeRegistry:
    """Write-once registry of item types.

    Parents must be registered before their children, so the only way to
    introduce a cycle is naming a type as its own parent, which is rejected.
    """

    def __init__(self, builtins: bool = True):
        self._types: dict[str, ItemType] = {}
        self._ancestors: dict[str, frozenset[str]] = {}
        self._effective: dict[str, frozenset[str]] = {}
        self._globals: set[str] = {DO_ANYTHING}
        self._all_item_abilities: set[str] = set()
        self._register(ItemType(ROOT, (), frozenset(ITEM_ABILITIES)))
        if builtins:
            for name, parents, abilities in BUILTIN_TYPES:
                self.define_type(name, parents, abilities)

    def define_type(
        self,
        name: str,
        parents: Iterable[str] = (ROOT,),
        item_abilities: Iterable[str] = (),
        global_abilities: Iterable[str] = (),
    ) -> ItemType:
        parents = tuple(dict.fromkeys(parents)) or (ROOT,)
        if not name:
            raise ValidationError("type name must be non-empty")
        if name in parents:
            raise CycleError(f"type {name} cannot inherit from itself")
        if name in self._types:
            raise ValidationError(f"type {name} already defined")
        for parent in parents:
            if parent not in self._types:
                raise UnknownTypeError(f"unknown parent type {parent!r} for {name}")
        return self._register(
            ItemType(name, parents, frozenset(item_abilities), frozenset(global_abilities))
        )

    def _register(self, item_type: ItemType) -> ItemType:
        name = item_type.name
        ancestors = {name}
        effective = set(item_type.own_item_abilities)
        for parent in item_type.parents:
            ancestors |= self._ancestors[parent]
            effective |= self._effective[parent]
        self._types[name] = item_type
        self._ancestors[name] = frozenset(ancestors)
        self._effective[name] = frozenset(effective)
        self._all_item_abilities |= item_type.own_item_abilities
        self._globals |= item_type.own_global_abilities
        self._globals.add(create_ability(name))
        return item_type

    def __contains__(self, name: object) -> bool:
        return name in self._types

    def __iter__(self):
        return iter(self._types)

    def get(self, name: str) -> ItemType:
        try:
            return self._types[name]
        except KeyError:
            raise UnknownTypeError(f"unknown type {name!r}") from None

    def ancestors(self, name: str) -> frozenset[str]:
        """All ancestors of ``name``, including itself."""
        self.get(name)
        return self._ancestors[name]

    def is_subtype(self, name: str, ancestor: str) -> bool:
        return ancestor in self.ancestors(name)

    def effective_item_abilities(self, name: str) -> frozenset[str]:
        self.get(name)
        return self._effective[name]

    def is_item_ability(self, type_name: str, ability: str) -> bool:
        return ability in self.effective_item_abilities(type_name)

    def is_known_item_ability(self, ability: str) -> bool:
        """True if some registered type declares ``ability``."""
        return ability in self._all_item_abilities

    def is_global_ability(self, ability: str) -> bool:
        return ability in self._globals

    def global_ability_vocabulary(self) -> frozenset[str]:
        return frozenset(self._globals)
