"""The world: registry, entities, memberships and permissions in one place.

Every mutation takes an ``actor``. ``None`` means the system, which bypasses
the metalevel guards; any other actor must hold the abilities the guards
require at the time of the call.
"""

from __future__ import annotations

import itertools
import logging

from . import resolver
from .errors import AuthorizationError, InvalidAbilityError, ValidationError
from .graph import Entity, Membership, MembershipGraph
from .registry import DO_ANYTHING, TypeRegistry, create_ability
from .store import ALL, ONE, GlobalPermission, Permission, PermissionStore, Spec

log = logging.getLogger(__name__)

ANONYMOUS = "anonymous"


class World:
    def __init__(self, anonymous: bool = True, registry: TypeRegistry | None = None):
        self.registry = registry if registry is not None else TypeRegistry()
        self.graph = MembershipGraph(self.registry)
        self.store = PermissionStore(self.registry, self.graph)
        self.anonymous: str | None = None
        self._ids = itertools.count(1)
        if anonymous:
            self.create_entity("Agent", id=ANONYMOUS, default_permission=False)
            self.anonymous = ANONYMOUS

    # types

    def define_type(self, name, parents=("Item",), item_abilities=(), global_abilities=()):
        return self.registry.define_type(name, parents, item_abilities, global_abilities)

    # guards

    def has_power_over(self, actor: str, entity_id: str) -> bool:
        """True if ``actor`` may ``do_anything`` to ``entity_id``."""
        return resolver.resolve_item_ability(self, actor, entity_id, DO_ANYTHING).allowed

    def _require_item(self, actor: str | None, entity_id: str, ability: str) -> None:
        if actor is None:
            return
        if not resolver.resolve_item_ability(self, actor, entity_id, ability).allowed:
            raise AuthorizationError(actor, ability, entity_id)

    def _require_global(self, actor: str | None, ability: str) -> None:
        if actor is None:
            return
        if not resolver.resolve_global_ability(self, actor, ability).allowed:
            raise AuthorizationError(actor, ability)

    def _require_over_object(self, actor: str | None, obj: Spec) -> None:
        if obj.shape == ALL:
            self._require_global(actor, DO_ANYTHING)
        else:
            self._require_item(actor, obj.target, DO_ANYTHING)

    # entities

    def create_entity(
        self,
        type_name: str,
        actor: str | None = None,
        *,
        id: str | None = None,
        creator: str | None = None,
        default_permission: bool = True,
    ) -> str:
        """Store a new entity and return its id.

        A guarded actor needs the global ``create <type>`` ability and becomes
        the creator. The creator receives a one-to-one ``do_anything`` allow
        on the new entity unless ``default_permission`` is off.
        """
        self.registry.get(type_name)
        if actor is not None:
            self.graph.require_agent(actor)
            self._require_global(actor, create_ability(type_name))
            if creator is not None and creator != actor:
                raise ValidationError(f"{actor!r} cannot create on behalf of {creator!r}")
            creator = actor
        if creator is not None:
            self.graph.require_agent(creator)
        if id is None:
            id = self._fresh_id(type_name)
        self.graph.add_entity(Entity(id, type_name, creator))
        if creator is not None and default_permission:
            self.store.put(Permission(Spec(ONE, creator), Spec(ONE, id), DO_ANYTHING, True))
        return id

    def _fresh_id(self, type_name: str) -> str:
        while True:
            candidate = f"{type_name.lower()}-{next(self._ids)}"
            if candidate not in self.graph:
                return candidate

    def delete_entity(self, entity_id: str, actor: str | None = None) -> None:
        """Remove an entity with its memberships and the permissions naming it."""
        self.graph.entity(entity_id)
        if entity_id == self.anonymous:
            raise ValidationError("the anonymous agent cannot be deleted")
        self._require_item(actor, entity_id, "delete")
        self.store.purge_entity(entity_id)
        self.graph.remove_entity(entity_id)

    def entity(self, entity_id: str) -> Entity:
        return self.graph.entity(entity_id)

    def items(self) -> list[Entity]:
        return list(self.graph.entities.values())

    def agents(self) -> list[str]:
        return [i for i in self.graph.entities if self.graph.is_agent(i)]

    def collections(self) -> list[str]:
        return [i for i in self.graph.entities if self.graph.is_collection(i)]

    # memberships

    def add_membership(
        self, collection: str, member: str, actor: str | None = None, enabled: bool = True
    ) -> Membership:
        """Add ``member`` to ``collection``.

        For a guarded actor the edge is only enabled when the actor also has
        power over the member; ``enabled=False`` always stores a disabled edge.
        """
        self.graph.require_collection(collection)
        self.graph.entity(member)
        if actor is not None:
            can_modify = resolver.resolve_item_ability(
                self, actor, collection, "modify_membership"
            ).allowed
            if not can_modify:
                if member != actor:
                    raise AuthorizationError(actor, "modify_membership", collection)
                self._require_item(actor, collection, "add_self")
            enabled = enabled and self.has_power_over(actor, member)
        edge = self.graph.add_edge(collection, member, enabled)
        log.debug("membership %s -> %s enabled=%s", collection, member, edge.enabled)
        return edge

    def remove_membership(self, collection: str, member: str, actor: str | None = None) -> Membership:
        self.graph.edge(collection, member)
        if actor is not None:
            can_modify = resolver.resolve_item_ability(
                self, actor, collection, "modify_membership"
            ).allowed
            if not can_modify:
                if member != actor:
                    raise AuthorizationError(actor, "modify_membership", collection)
                self._require_item(actor, collection, "remove_self")
        return self.graph.remove_edge(collection, member)

    def set_permission_enabled(
        self, collection: str, member: str, value: bool, actor: str | None = None
    ) -> Membership:
        self.graph.edge(collection, member)
        self._require_item(actor, member, DO_ANYTHING)
        return self.graph.set_enabled(collection, member, value)

    # permissions

    def set_permission(
        self, subject: Spec, obj: Spec, ability: str, allowed: bool, actor: str | None = None
    ) -> Permission:
        """Insert a permission, or overwrite the sign of the one with the same key."""
        permission = Permission(subject, obj, ability, allowed)
        self._validate(permission)
        self._require_over_object(actor, obj)
        return self.store.put(permission)

    def _validate(self, permission: Permission) -> None:
        self.store.check_subject(permission.subject)
        self.store.check_object(permission.object)
        if not self.registry.is_known_item_ability(permission.ability):
            raise InvalidAbilityError(f"unknown item ability {permission.ability!r}")

    def delete_permission(
        self, subject: Spec, obj: Spec, ability: str, actor: str | None = None
    ) -> Permission | None:
        self._require_over_object(actor, obj)
        return self.store.discard(subject, obj, ability)

    def set_global_permission(
        self, subject: Spec, ability: str, allowed: bool, actor: str | None = None
    ) -> GlobalPermission:
        permission = GlobalPermission(subject, ability, allowed)
        if not self.registry.is_global_ability(ability):
            raise InvalidAbilityError(f"unknown global ability {ability!r}")
        self.store.check_subject(subject)
        self._require_global(actor, DO_ANYTHING)
        return self.store.put_global(permission)

    def delete_global_permission(
        self, subject: Spec, ability: str, actor: str | None = None
    ) -> GlobalPermission | None:
        self._require_global(actor, DO_ANYTHING)
        return self.store.discard_global(subject, ability)

    # queries

    def check(self, agent: str, item: str, ability: str) -> resolver.Decision:
        return resolver.resolve_item_ability(self, agent, item, ability)

    def check_global(self, agent: str, ability: str) -> resolver.Decision:
        return resolver.resolve_global_ability(self, agent, ability)

    def filter_items(self, agent: str, ability: str) -> set[str]:
        return resolver.filter_items(self, agent, ability)

    def explain(self, agent: str, item: str, ability: str) -> resolver.Decision:
        return resolver.explain(self, agent, item, ability)

    def lint(self, agent: str, item: str, ability: str) -> resolver.LoopholeReport:
        return resolver.lint_anonymous(self, agent, item, ability)

