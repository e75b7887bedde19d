"""Entity table and collection-membership graph.

Membership edges point from a collection to a member and carry the
``permission_enabled`` flag. Two closures are derived from them:

* recursive membership: every entity reachable from a collection;
* enabled recursive membership: entities reachable along a path whose edges
  are all enabled.

Closures are computed lazily per node by breadth-first search and dropped
wholesale on any mutation. Cycles are allowed.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator

from .errors import UnknownEntityError, ValidationError
from .registry import TypeRegistry


@dataclass(frozen=True)
class Entity:
    id: str
    type: str
    creator: str | None = None


@dataclass(frozen=True)
class Membership:
    collection: str
    member: str
    enabled: bool


def _reach(start: str, adjacency: dict[str, dict[str, bool]], enabled_only: bool) -> frozenset[str]:
    seen: set[str] = set()
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for nxt, enabled in adjacency.get(node, {}).items():
            if enabled_only and not enabled:
                continue
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    return frozenset(seen)


class MembershipGraph:
    def __init__(self, registry: TypeRegistry):
        self.registry = registry
        self.entities: dict[str, Entity] = {}
        self._children: dict[str, dict[str, bool]] = {}
        self._parents: dict[str, dict[str, bool]] = {}
        self._cache: dict[tuple[str, str, bool], frozenset[str]] = {}

    # entities

    def add_entity(self, entity: Entity) -> Entity:
        if entity.id in self.entities:
            raise ValidationError(f"entity {entity.id!r} already exists")
        self.registry.get(entity.type)
        self.entities[entity.id] = entity
        return entity

    def remove_entity(self, entity_id: str) -> list[Membership]:
        """Drop an entity and every edge touching it; returns the removed edges."""
        self.entity(entity_id)
        removed = [
            Membership(c, entity_id, e) for c, e in self._parents.get(entity_id, {}).items()
        ] + [
            Membership(entity_id, m, e) for m, e in self._children.get(entity_id, {}).items()
        ]
        for edge in removed:
            self._drop_edge(edge.collection, edge.member)
        self._children.pop(entity_id, None)
        self._parents.pop(entity_id, None)
        del self.entities[entity_id]
        self._cache.clear()
        return removed

    def entity(self, entity_id: str) -> Entity:
        try:
            return self.entities[entity_id]
        except KeyError:
            raise UnknownEntityError(f"unknown entity {entity_id!r}") from None

    def __contains__(self, entity_id: object) -> bool:
        return entity_id in self.entities

    def is_a(self, entity_id: str, type_name: str) -> bool:
        return self.registry.is_subtype(self.entity(entity_id).type, type_name)

    def is_agent(self, entity_id: str) -> bool:
        return self.is_a(entity_id, "Agent")

    def is_collection(self, entity_id: str) -> bool:
        return self.is_a(entity_id, "Collection")

    def require_collection(self, entity_id: str) -> Entity:
        entity = self.entity(entity_id)
        if not self.registry.is_subtype(entity.type, "Collection"):
            raise ValidationError(f"{entity_id!r} is a {entity.type}, not a Collection")
        return entity

    def require_agent(self, entity_id: str) -> Entity:
        entity = self.entity(entity_id)
        if not self.registry.is_subtype(entity.type, "Agent"):
            raise ValidationError(f"{entity_id!r} is a {entity.type}, not an Agent")
        return entity

    # edges

    def add_edge(self, collection: str, member: str, enabled: bool) -> Membership:
        self.require_collection(collection)
        self.entity(member)
        if collection == member:
            raise ValidationError(f"{collection!r} cannot be a member of itself")
        if member in self._children.get(collection, {}):
            raise ValidationError(f"{member!r} is already a member of {collection!r}")
        self._children.setdefault(collection, {})[member] = enabled
        self._parents.setdefault(member, {})[collection] = enabled
        self._cache.clear()
        return Membership(collection, member, enabled)

    def set_enabled(self, collection: str, member: str, enabled: bool) -> Membership:
        current = self.edge(collection, member)
        if current.enabled != enabled:
            self._children[collection][member] = enabled
            self._parents[member][collection] = enabled
            self._cache.clear()
        return Membership(collection, member, enabled)

    def remove_edge(self, collection: str, member: str) -> Membership:
        edge = self.edge(collection, member)
        self._drop_edge(collection, member)
        self._cache.clear()
        return edge

    def _drop_edge(self, collection: str, member: str) -> None:
        del self._children[collection][member]
        del self._parents[member][collection]

    def edge(self, collection: str, member: str) -> Membership:
        try:
            enabled = self._children[collection][member]
        except KeyError:
            raise ValidationError(f"{member!r} is not a direct member of {collection!r}") from None
        return Membership(collection, member, enabled)

    def has_edge(self, collection: str, member: str) -> bool:
        return member in self._children.get(collection, {})

    def edges(self) -> Iterator[Membership]:
        for collection, members in self._children.items():
            for member, enabled in members.items():
                yield Membership(collection, member, enabled)

    # closures

    def _closure(self, node: str, downward: bool, enabled_only: bool) -> frozenset[str]:
        key = (node, "down" if downward else "up", enabled_only)
        hit = self._cache.get(key)
        if hit is None:
            adjacency = self._children if downward else self._parents
            hit = self._cache[key] = _reach(node, adjacency, enabled_only)
        return hit

    def recursive_members(self, collection: str) -> frozenset[str]:
        self.require_collection(collection)
        return self._closure(collection, True, False)

    def enabled_recursive_members(self, collection: str) -> frozenset[str]:
        self.require_collection(collection)
        return self._closure(collection, True, True)

    def containing_collections(self, entity_id: str) -> frozenset[str]:
        """Collections that have ``entity_id`` as a direct or indirect member."""
        return self._closure(entity_id, False, False)

    def enabled_containing_collections(self, entity_id: str) -> frozenset[str]:
        """Collections reaching ``entity_id`` along an all-enabled path."""
        return self._closure(entity_id, False, True)
