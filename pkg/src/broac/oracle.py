"""Brute-force reference decisions.

Works on a plain snapshot of the world (edge list, permission rows) and
never touches the closure caches or store indexes. Group and collection
coverage is decided by enumerating simple membership paths; the verdict
applies the rule as worded: the agent holds the ability when some relevant
allow exists at a level where no relevant deny sits at the same or a
lower-numbered level. Holding the global ``do_anything`` short-circuits to
allowed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable

if TYPE_CHECKING:
    from .world import World

DO_ANYTHING = "do_anything"

PRECEDENCE = {
    ("One", "One"): 1, ("One", "Some"): 2, ("One", "All"): 3,
    ("Some", "One"): 4, ("Some", "Some"): 5, ("Some", "All"): 6,
    ("All", "One"): 7, ("All", "Some"): 8, ("All", "All"): 9,
}
GLOBAL_PRECEDENCE = {"One": 1, "Some": 2, "All": 3}


@dataclass(frozen=True)
class Row:
    subject: tuple[str, str | None]
    object: tuple[str, str | None] | None
    ability: str
    allowed: bool


class Oracle:
    def __init__(self, world: World):
        self.edges: list[tuple[str, str, bool]] = [
            (m.collection, m.member, m.enabled) for m in world.graph.edges()
        ]
        self.rows = [
            Row((p.subject.name, p.subject.target), (p.object.name, p.object.target),
                p.ability, p.allowed)
            for p in world.store.item_permissions()
        ]
        self.global_rows = [
            Row((g.subject.name, g.subject.target), None, g.ability, g.allowed)
            for g in world.store.global_permissions()
        ]
        self._paths: dict[tuple[str, str, bool], bool] = {}

    def path_exists(self, start: str, goal: str, enabled_only: bool) -> bool:
        """Is there a path of one or more membership edges from start to goal?"""
        key = (start, goal, enabled_only)
        if key not in self._paths:
            self._paths[key] = self._search(start, goal, enabled_only, {start})
        return self._paths[key]

    def _search(self, node: str, goal: str, enabled_only: bool, on_path: set[str]) -> bool:
        for c, m, enabled in self.edges:
            if c != node or (enabled_only and not enabled):
                continue
            if m == goal:
                return True
            if m in on_path:
                continue
            if self._search(m, goal, enabled_only, on_path | {m}):
                return True
        return False

    def _subject_covers(self, row: Row, agent: str) -> bool:
        shape, target = row.subject
        if shape == "One":
            return target == agent
        if shape == "Some":
            return self.path_exists(target, agent, enabled_only=False)
        return True

    def _object_covers(self, row: Row, item: str) -> bool:
        shape, target = row.object
        if shape == "One":
            return target == item
        if shape == "Some":
            return self.path_exists(target, item, enabled_only=True)
        return True

    @staticmethod
    def _holds(relevant: list[tuple[int, bool]]) -> bool:
        for level, allowed in relevant:
            if not allowed:
                continue
            if not any(not a and lvl <= level for lvl, a in relevant):
                return True
        return False

    def global_ability(self, agent: str, ability: str) -> bool:
        relevant = [
            (GLOBAL_PRECEDENCE[r.subject[0]], r.allowed)
            for r in self.global_rows
            if r.ability in (ability, DO_ANYTHING) and self._subject_covers(r, agent)
        ]
        return self._holds(relevant)

    def item_ability(self, agent: str, item: str, ability: str) -> bool:
        if self.global_ability(agent, DO_ANYTHING):
            return True
        relevant = [
            (PRECEDENCE[(r.subject[0], r.object[0])], r.allowed)
            for r in self.rows
            if r.ability in (ability, DO_ANYTHING)
            and self._subject_covers(r, agent)
            and self._object_covers(r, item)
        ]
        return self._holds(relevant)


def oracle_resolve(world: World, agent: str, item: str, ability: str) -> bool:
    return Oracle(world).item_ability(agent, item, ability)


def oracle_global(world: World, agent: str, ability: str) -> bool:
    return Oracle(world).global_ability(agent, ability)


@dataclass(frozen=True)
class Divergence:
    agent: str
    item: str | None
    ability: str
    resolver: bool
    oracle: bool


def divergences(world: World, abilities: Iterable[str]) -> list[Divergence]:
    """Compare resolver and oracle on every agent x item x ability triple.

    Abilities not applicable to an item's type are skipped. Every global
    ability in the vocabulary is compared too (reported with ``item=None``).
    """
    oracle = Oracle(world)
    abilities = list(abilities)
    registry = world.registry
    out = []
    agents = sorted(world.agents())
    entities = sorted(world.graph.entities.values(), key=lambda e: e.id)
    for agent in agents:
        for entity in entities:
            for ability in abilities:
                if not registry.is_item_ability(entity.type, ability):
                    continue
                got = world.check(agent, entity.id, ability).allowed
                want = oracle.item_ability(agent, entity.id, ability)
                if got != want:
                    out.append(Divergence(agent, entity.id, ability, got, want))
        for ability in sorted(registry.global_ability_vocabulary()):
            got = world.check_global(agent, ability).allowed
            want = oracle.global_ability(agent, ability)
            if got != want:
                out.append(Divergence(agent, None, ability, got, want))
    return out
