"""Allow/deny resolution over the precedence ladder.

Lower level numbers win; at equal level a deny beats an allow; with no
relevant permission the answer is deny. An agent that holds the global
``do_anything`` ability bypasses item-level resolution entirely.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Union

from .errors import AnonymousDisabledError, InvalidAbilityError
from .registry import DO_ANYTHING
from .store import ALL_SPEC, ONE, SOME, GlobalPermission, Permission

if TYPE_CHECKING:
    from .world import World

CLOSED_WORLD = "closed_world"
GLOBAL_OVERRIDE = "global_override"
LEVEL_COMPARISON = "level_comparison"

NO_RANK = 100

AnyPermission = Union[Permission, GlobalPermission]


@dataclass(frozen=True)
class Candidate:
    permission: AnyPermission
    level: int

    @property
    def allowed(self) -> bool:
        return self.permission.allowed


@dataclass(frozen=True)
class Decision:
    allowed: bool
    reason: str
    winning_level: int | None = None
    candidates: tuple[Candidate, ...] = field(default=())

    def deciding(self) -> list[Candidate]:
        """Candidates at the winning level whose sign matches the verdict."""
        if self.winning_level is None:
            return []
        return [
            c for c in self.candidates
            if c.level == self.winning_level and c.allowed == self.allowed
        ]


def _order(c: Candidate) -> tuple:
    p = c.permission
    return (c.level, c.allowed, p.subject, getattr(p, "object", ALL_SPEC), p.ability)


def _decide(hits: list[tuple[AnyPermission, int]]) -> Decision:
    if not hits:
        return Decision(False, CLOSED_WORLD)
    candidates = tuple(sorted(
        (Candidate(p, level) for p, level in hits),
        key=_order,
    ))
    inf = float("inf")
    best_allow = min((c.level for c in candidates if c.allowed), default=inf)
    best_deny = min((c.level for c in candidates if not c.allowed), default=inf)
    allowed = best_allow < best_deny
    level = best_allow if allowed else best_deny
    return Decision(allowed, LEVEL_COMPARISON, int(level), candidates)


def resolve_global_ability(world: World, agent: str, ability: str) -> Decision:
    return _decide(world.store.relevant_global_permissions(agent, ability))


def resolve_item_ability(world: World, agent: str, item: str, ability: str) -> Decision:
    hits = world.store.relevant_item_permissions(agent, item, ability)
    if resolve_global_ability(world, agent, DO_ANYTHING).allowed:
        return Decision(True, GLOBAL_OVERRIDE)
    return _decide(hits)


def explain(world: World, agent: str, item: str, ability: str) -> Decision:
    """Like :func:`resolve_item_ability` but always carries the full trace.

    Under a global override the item-level candidates are still listed even
    though they did not take part in the verdict.
    """
    hits = world.store.relevant_item_permissions(agent, item, ability)
    decision = _decide(hits)
    if resolve_global_ability(world, agent, DO_ANYTHING).allowed:
        return Decision(True, GLOBAL_OVERRIDE, None, decision.candidates)
    return decision


def filter_items(world: World, agent: str, ability: str) -> set[str]:
    """Ids of every item on which ``agent`` holds ``ability``.

    Batched: the agent's subject-side permissions are gathered once and the
    collection-shaped ones are pushed down their enabled closure. Only items
    some permission touches are visited individually; the rest share the
    verdict of the all-items permissions.
    """
    registry = world.registry
    if not registry.is_known_item_ability(ability):
        raise InvalidAbilityError(f"unknown item ability {ability!r}")
    world.graph.entity(agent)
    entities = world.graph.entities
    applicable = {t for t in registry if registry.is_item_ability(t, ability)}
    every_type = len(applicable) == len(list(registry))

    def applicable_ids() -> set[str]:
        if every_type:
            return set(entities)
        return {i for i, e in entities.items() if e.type in applicable}

    if resolve_global_ability(world, agent, DO_ANYTHING).allowed:
        return applicable_ids()

    # Rank = 2 * level, plus one for an allow; the smallest rank decides and
    # is odd exactly when the allow beats every deny. NO_RANK is even (deny).
    touched: dict[str, int] = {}
    by_collection: dict[str, int] = {}
    every = NO_RANK
    abilities = (ability,) if ability == DO_ANYTHING else (ability, DO_ANYTHING)
    for subject in world.store.subject_specs(agent):
        for ab in abilities:
            for obj, p in world.store.by_subject(subject, ab).items():
                rank = 2 * p.level + p.allowed
                if obj.shape == ONE:
                    if rank < touched.get(obj.target, NO_RANK):
                        touched[obj.target] = rank
                elif obj.shape == SOME:
                    if rank < by_collection.get(obj.target, NO_RANK):
                        by_collection[obj.target] = rank
                elif rank < every:
                    every = rank

    closure = world.graph.enabled_recursive_members
    for collection, rank in by_collection.items():
        for member in closure(collection):
            if rank < touched.get(member, NO_RANK):
                touched[member] = rank

    if every & 1:
        out = applicable_ids()
        out.difference_update(i for i, rank in touched.items() if rank < every and not rank & 1)
        return out
    return {
        i for i, rank in touched.items()
        if rank < every and rank & 1 and (every_type or entities[i].type in applicable)
    }


@dataclass(frozen=True)
class LoopholeReport:
    agent: str
    item: str
    ability: str
    agent_decision: Decision
    anonymous_decision: Decision

    @property
    def flagged(self) -> bool:
        return not self.agent_decision.allowed and self.anonymous_decision.allowed


def lint_anonymous(world: World, agent: str, item: str, ability: str) -> LoopholeReport:
    """Flag a triple the agent is denied but could reach by logging out."""
    if world.anonymous is None:
        raise AnonymousDisabledError("anonymous access is disabled in this world")
    return LoopholeReport(
        agent,
        item,
        ability,
        resolve_item_ability(world, agent, item, ability),
        resolve_item_ability(world, world.anonymous, item, ability),
    )

