"""Deterministic random worlds.

``small_world`` produces compact, adversarial worlds for oracle comparison:
every precedence level, both signs, cyclic and partially disabled membership
graphs. ``random_world`` produces site-shaped worlds for benchmarking, with
a fixed number of items and permissions per user.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .registry import DO_ANYTHING
from .store import ALL_SPEC, ONE, SOME, GlobalPermission, Permission, Spec
from .world import World

FUZZ_ABILITIES = (
    DO_ANYTHING,
    "view Item.name",
    "edit Item.name",
    "view TextDocument.body",
    "modify_membership",
)
FUZZ_GLOBALS = (DO_ANYTHING, "create TextDocument", "create Collection", "create Person")
SITE_ABILITIES = ("view Item.name", "edit Item.name", "view TextDocument.body", "comment_on")


def small_world(
    seed: int,
    max_agents: int = 8,
    max_items: int = 12,
    max_collections: int = 5,
    max_permissions: int = 30,
) -> World:
    rng = random.Random(seed)
    world = World()
    store = world.store

    agents = [world.anonymous]
    for k in range(rng.randint(1, max_agents - 1)):
        agents.append(world.create_entity(rng.choice(("Agent", "Person")), id=f"a{k}"))

    collections = []
    for k in range(rng.randint(0, max_collections)):
        kind = rng.choice(("Collection", "Group"))
        collections.append(world.create_entity(kind, id=f"c{k}", default_permission=False))

    items = []
    for k in range(rng.randint(1, max_items)):
        kind = rng.choice(("TextDocument", "Document", "TextDocument"))
        creator = rng.choice(agents[1:] + [None])
        items.append(world.create_entity(
            kind, id=f"i{k}", creator=creator, default_permission=rng.random() < 0.5
        ))

    entities = agents + collections + items
    for c in collections:
        for member in rng.sample(entities, k=min(len(entities), rng.randint(0, 4))):
            if member != c and not world.graph.has_edge(c, member):
                world.add_membership(c, member, enabled=rng.random() < 0.6)

    def subject() -> Spec:
        roll = rng.random()
        if roll < 0.4:
            return Spec(ONE, rng.choice(agents))
        if roll < 0.75 and collections:
            return Spec(SOME, rng.choice(collections))
        return ALL_SPEC

    def obj() -> Spec:
        roll = rng.random()
        if roll < 0.4:
            return Spec(ONE, rng.choice(entities))
        if roll < 0.75 and collections:
            return Spec(SOME, rng.choice(collections))
        return ALL_SPEC

    budget = max_permissions - len(store.item_permissions())
    for _ in range(rng.randint(0, max(budget, 0))):
        ability = DO_ANYTHING if rng.random() < 0.15 else rng.choice(FUZZ_ABILITIES[1:])
        store.put(Permission(subject(), obj(), ability, rng.random() < 0.55))

    for _ in range(rng.randint(0, 3)):
        ability = DO_ANYTHING if rng.random() < 0.3 else rng.choice(FUZZ_GLOBALS[1:])
        store.put_global(GlobalPermission(subject(), ability, rng.random() < 0.5))
    return world


@dataclass(frozen=True)
class WorldGenParams:
    users: int
    items_per_user: int = 12
    permissions_per_user: int = 24
    seed: int = 0
    anonymous_visible_fraction: float = 0.5

    def __post_init__(self):
        if self.users < 1 or self.items_per_user < 1 or self.permissions_per_user < 1:
            raise ValueError("counts must be positive")
        if not 0.0 <= self.anonymous_visible_fraction <= 1.0:
            raise ValueError("anonymous_visible_fraction must lie in [0, 1]")


def random_world(params: WorldGenParams) -> World:
    """Build a site of ``params.users`` users.

    Each user owns one public collection plus ``items_per_user - 1`` text
    documents, all created with the default creator permission. A share of
    each user's documents (``anonymous_visible_fraction``) is placed in the
    public collection, which is readable by all agents. The remaining
    permission budget is spread over random shapes, abilities and signs.
    """
    rng = random.Random(params.seed)
    world = World()
    store = world.store

    users = [world.create_entity("Person", id=f"u{k}") for k in range(params.users)]
    groups = [
        world.create_entity("Group", id=f"g{k}", creator=rng.choice(users), default_permission=False)
        for k in range(max(1, params.users // 5))
    ]
    for u in users:
        for g in rng.sample(groups, k=min(len(groups), rng.randint(1, 2))):
            world.add_membership(g, u)

    owned: dict[str, list[str]] = {}
    public: dict[str, str] = {}
    for k, u in enumerate(users):
        public[u] = world.create_entity("Collection", id=f"u{k}-public", creator=u)
        docs = [
            world.create_entity("TextDocument", id=f"u{k}-d{j}", creator=u)
            for j in range(params.items_per_user - 1)
        ]
        owned[u] = docs
        for doc in docs:
            if rng.random() < params.anonymous_visible_fraction:
                world.add_membership(public[u], doc)
        if params.permissions_per_user > params.items_per_user:
            store.put(Permission(ALL_SPEC, Spec(SOME, public[u]), "view Item.name", True))

    all_docs = [d for docs in owned.values() for d in docs]
    for u in users:
        # documents filed into someone else's collection arrive disabled
        if rng.random() < 0.3:
            other = rng.choice(users)
            doc = rng.choice(owned[u])
            if other != u and not world.graph.has_edge(public[other], doc):
                world.add_membership(public[other], doc, enabled=False)

        extra = params.permissions_per_user - params.items_per_user - 1
        placed = attempts = 0
        while placed < extra and attempts < 50 * extra:
            attempts += 1
            roll = rng.random()
            if roll < 0.5:
                subj = Spec(ONE, rng.choice(users))
            elif roll < 0.8:
                subj = Spec(SOME, rng.choice(groups))
            else:
                subj = ALL_SPEC
            roll = rng.random()
            if roll < 0.75:
                target = Spec(ONE, rng.choice(owned[u]) if rng.random() < 0.8 else rng.choice(all_docs))
            elif roll < 0.98:
                target = Spec(SOME, public[u])
            elif subj != ALL_SPEC:
                target = ALL_SPEC
            else:
                continue
            ability = rng.choice(SITE_ABILITIES)
            if store.get(subj, target, ability) is not None:
                continue
            store.put(Permission(subj, target, ability, rng.random() < 0.7))
            placed += 1
    return world
