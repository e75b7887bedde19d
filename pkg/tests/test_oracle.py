import pytest

from broac import ALL_SPEC, Spec, World
from broac import oracle as oracle_mod
from broac.generate import FUZZ_ABILITIES, small_world
from broac.oracle import Oracle, divergences, oracle_global, oracle_resolve


def test_oracle_literal_rule():
    assert not Oracle._holds([])
    assert Oracle._holds([(3, True), (5, False)])
    assert not Oracle._holds([(5, True), (5, False)])
    assert not Oracle._holds([(2, False), (5, True)])
    assert Oracle._holds([(2, False), (1, True)])


def test_oracle_path_search_respects_flags():
    w = World()
    w.create_entity("Collection", id="a")
    w.create_entity("Collection", id="b")
    w.create_entity("Document", id="d")
    w.add_membership("a", "b")
    w.add_membership("b", "a")
    w.add_membership("b", "d", enabled=False)
    o = Oracle(w)
    assert o.path_exists("a", "d", enabled_only=False)
    assert not o.path_exists("a", "d", enabled_only=True)
    assert o.path_exists("a", "a", enabled_only=True)


def test_oracle_helpers():
    w = World()
    w.create_entity("Person", id="p")
    w.create_entity("Document", id="d")
    w.set_permission(ALL_SPEC, Spec.one("d"), "view Item.name", True)
    w.set_global_permission(Spec.one("p"), "create Person", True)
    assert oracle_resolve(w, "p", "d", "view Item.name")
    assert oracle_global(w, "p", "create Person")
    assert not oracle_global(w, "anonymous", "create Person")


@pytest.mark.parametrize("seed", range(40))
def test_resolver_matches_oracle(seed):
    assert divergences(small_world(seed), FUZZ_ABILITIES) == []


def test_oracle_catches_broken_tie_rule(monkeypatch):
    """A resolver where allows win ties must diverge from the oracle somewhere."""
    from broac import resolver

    original = resolver._decide

    def allow_wins_ties(hits):
        d = original(hits)
        if d.candidates and not d.allowed and any(
            c.allowed and c.level == d.winning_level for c in d.candidates
        ):
            return resolver.Decision(True, d.reason, d.winning_level, d.candidates)
        return d

    monkeypatch.setattr(resolver, "_decide", allow_wins_ties)
    assert any(divergences(small_world(seed), FUZZ_ABILITIES) for seed in range(200))


def test_oracle_catches_ignored_enabled_flag(monkeypatch):
    from broac.store import PermissionStore

    def all_containers(self, item):
        specs = [Spec.one(item)]
        specs += [Spec.some(c) for c in sorted(self.graph.containing_collections(item))]
        return specs + [ALL_SPEC]

    monkeypatch.setattr(PermissionStore, "object_specs", all_containers)
    assert any(divergences(small_world(seed), FUZZ_ABILITIES) for seed in range(200))
    assert oracle_mod.PRECEDENCE[("Some", "Some")] == 5
