"""Signed permission relation objects and their relevance queries.

An item permission links a subject spec (one agent, the members of a
collection, or all agents) to an object spec (one item, the items of a
collection, or all items) for a single ability, with a sign. Its precedence
level is ``3 * (subject_rank - 1) + object_rank`` with ranks one=1, some=2,
all=3, giving::

                 item  collection  all items
    agent          1        2          3
    group          4        5          6
    all agents     7        8          9

Global permissions have a subject only and use the subject rank as level.
At most one permission exists per (subject, object, ability) key; storing a
second one replaces the sign of the first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .errors import InvalidAbilityError, ValidationError
from .graph import MembershipGraph
from .registry import DO_ANYTHING, TypeRegistry

ONE, SOME, ALL = 1, 2, 3
SHAPE_NAMES = {ONE: "One", SOME: "Some", ALL: "All"}


class Spec(NamedTuple):
    """Subject or object side of a permission. ``target`` is None for ALL."""

    shape: int
    target: str | None = None

    @classmethod
    def one(cls, target: str) -> Spec:
        return cls(ONE, target)

    @classmethod
    def some(cls, collection: str) -> Spec:
        return cls(SOME, collection)

    @property
    def name(self) -> str:
        return SHAPE_NAMES[self.shape]


ALL_SPEC = Spec(ALL, None)


def level_of(subject_shape: int, object_shape: int) -> int:
    return 3 * (subject_shape - 1) + object_shape


@dataclass(frozen=True)
class Permission:
    subject: Spec
    object: Spec
    ability: str
    allowed: bool
    level: int = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "level", level_of(self.subject.shape, self.object.shape))

    @property
    def key(self) -> tuple[Spec, Spec, str]:
        return (self.subject, self.object, self.ability)

    @property
    def kind(self) -> str:
        return f"{self.subject.name}To{self.object.name}"


@dataclass(frozen=True)
class GlobalPermission:
    subject: Spec
    ability: str
    allowed: bool

    @property
    def key(self) -> tuple[Spec, str]:
        return (self.subject, self.ability)

    @property
    def level(self) -> int:
        return self.subject.shape

    @property
    def kind(self) -> str:
        return self.subject.name


class PermissionStore:
    def __init__(self, registry: TypeRegistry, graph: MembershipGraph):
        self.registry = registry
        self.graph = graph
        self._items: dict[tuple[Spec, Spec, str], Permission] = {}
        # (subject, ability) -> object -> permission
        self._by_subject: dict[tuple[Spec, str], dict[Spec, Permission]] = {}
        self._globals: dict[tuple[Spec, str], GlobalPermission] = {}

    def __len__(self) -> int:
        return len(self._items) + len(self._globals)

    def item_permissions(self) -> list[Permission]:
        return list(self._items.values())

    def global_permissions(self) -> list[GlobalPermission]:
        return list(self._globals.values())

    def get(self, subject: Spec, obj: Spec, ability: str) -> Permission | None:
        return self._items.get((subject, obj, ability))

    def get_global(self, subject: Spec, ability: str) -> GlobalPermission | None:
        return self._globals.get((subject, ability))

    # validation

    def check_subject(self, subject: Spec) -> None:
        if subject.shape == ONE:
            self.graph.require_agent(_target(subject))
        elif subject.shape == SOME:
            self.graph.require_collection(_target(subject))
        elif subject != ALL_SPEC:
            raise ValidationError(f"malformed subject {subject!r}")

    def check_object(self, obj: Spec) -> None:
        if obj.shape == ONE:
            self.graph.entity(_target(obj))
        elif obj.shape == SOME:
            self.graph.require_collection(_target(obj))
        elif obj != ALL_SPEC:
            raise ValidationError(f"malformed object {obj!r}")

    # mutation (unguarded; the world applies metalevel guards)

    def put(self, permission: Permission) -> Permission:
        if not self.registry.is_known_item_ability(permission.ability):
            raise InvalidAbilityError(f"unknown item ability {permission.ability!r}")
        self.check_subject(permission.subject)
        self.check_object(permission.object)
        self._items[permission.key] = permission
        self._by_subject.setdefault((permission.subject, permission.ability), {})[
            permission.object
        ] = permission
        return permission

    def discard(self, subject: Spec, obj: Spec, ability: str) -> Permission | None:
        permission = self._items.pop((subject, obj, ability), None)
        if permission is not None:
            bucket = self._by_subject[(subject, ability)]
            del bucket[obj]
            if not bucket:
                del self._by_subject[(subject, ability)]
        return permission

    def put_global(self, permission: GlobalPermission) -> GlobalPermission:
        if not self.registry.is_global_ability(permission.ability):
            raise InvalidAbilityError(f"unknown global ability {permission.ability!r}")
        self.check_subject(permission.subject)
        self._globals[permission.key] = permission
        return permission

    def discard_global(self, subject: Spec, ability: str) -> GlobalPermission | None:
        return self._globals.pop((subject, ability), None)

    def purge_entity(self, entity_id: str) -> int:
        """Remove every permission whose subject or object names ``entity_id``."""
        doomed = [
            p for p in self._items.values()
            if p.subject.target == entity_id or p.object.target == entity_id
        ]
        for p in doomed:
            self.discard(*p.key)
        doomed_globals = [p for p in self._globals.values() if p.subject.target == entity_id]
        for g in doomed_globals:
            del self._globals[g.key]
        return len(doomed) + len(doomed_globals)

    # relevance

    def subject_specs(self, agent: str) -> list[Spec]:
        """Every subject spec that covers ``agent``.

        Group membership ignores ``permission_enabled``; the flag only gates
        object-side propagation.
        """
        specs = [Spec(ONE, agent)]
        specs.extend(Spec(SOME, c) for c in sorted(self.graph.containing_collections(agent)))
        specs.append(ALL_SPEC)
        return specs

    def object_specs(self, item: str) -> list[Spec]:
        specs = [Spec(ONE, item)]
        specs.extend(Spec(SOME, c) for c in sorted(self.graph.enabled_containing_collections(item)))
        specs.append(ALL_SPEC)
        return specs

    def by_subject(self, subject: Spec, ability: str) -> dict[Spec, Permission]:
        return self._by_subject.get((subject, ability), {})

    def relevant_item_permissions(
        self, agent: str, item: str, ability: str
    ) -> list[tuple[Permission, int]]:
        item_type = self.graph.entity(item).type
        if not self.registry.is_item_ability(item_type, ability):
            raise InvalidAbilityError(f"{ability!r} does not apply to {item_type} {item!r}")
        self.graph.entity(agent)
        abilities = _abilities(ability)
        objects = self.object_specs(item)
        hits = []
        for subject in self.subject_specs(agent):
            for ab in abilities:
                bucket = self._by_subject.get((subject, ab))
                if not bucket:
                    continue
                for obj in objects:
                    p = bucket.get(obj)
                    if p is not None:
                        hits.append((p, p.level))
        return hits

    def relevant_global_permissions(
        self, agent: str, ability: str
    ) -> list[tuple[GlobalPermission, int]]:
        if not self.registry.is_global_ability(ability):
            raise InvalidAbilityError(f"unknown global ability {ability!r}")
        self.graph.entity(agent)
        hits = []
        for subject in self.subject_specs(agent):
            for ab in _abilities(ability):
                p = self._globals.get((subject, ab))
                if p is not None:
                    hits.append((p, p.level))
        return hits


def _abilities(ability: str) -> Iterable[str]:
    return (ability,) if ability == DO_ANYTHING else (ability, DO_ANYTHING)


def _target(spec: Spec) -> str:
    if spec.target is None:
        raise ValidationError(f"{spec.name} spec needs a target")
    return spec.target
