import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from broac import TypeRegistry, UnknownEntityError, ValidationError
from broac.graph import Entity, MembershipGraph


def make_graph(ids, collections=()):
    g = MembershipGraph(TypeRegistry())
    for i in ids:
        g.add_entity(Entity(i, "Collection" if i in collections else "Document", None))
    return g


def test_edges_and_closures():
    g = make_graph("abcd", collections="abc")
    g.add_edge("a", "b", True)
    g.add_edge("b", "c", False)
    g.add_edge("c", "d", True)
    assert g.recursive_members("a") == {"b", "c", "d"}
    assert g.enabled_recursive_members("a") == {"b"}
    assert g.containing_collections("d") == {"a", "b", "c"}
    assert g.enabled_containing_collections("d") == {"c"}


def test_cycles_terminate():
    g = make_graph("ab", collections="ab")
    g.add_edge("a", "b", True)
    g.add_edge("b", "a", True)
    assert g.recursive_members("a") == {"a", "b"}


def test_mutations_invalidate_cache():
    g = make_graph("ab", collections="a")
    g.add_edge("a", "b", True)
    assert g.enabled_recursive_members("a") == {"b"}
    g.set_enabled("a", "b", False)
    assert g.enabled_recursive_members("a") == frozenset()
    g.remove_edge("a", "b")
    assert g.recursive_members("a") == frozenset()


def test_rejections():
    g = make_graph("ab", collections="a")
    with pytest.raises(ValidationError):
        g.add_edge("a", "a", True)
    g.add_edge("a", "b", True)
    with pytest.raises(ValidationError):
        g.add_edge("a", "b", True)
    with pytest.raises(ValidationError):
        g.add_edge("b", "a", True)
    with pytest.raises(ValidationError):
        g.edge("a", "zz")
    with pytest.raises(UnknownEntityError):
        g.entity("zz")


def test_remove_entity_cascades():
    g = make_graph("abc", collections="ab")
    g.add_edge("a", "b", True)
    g.add_edge("b", "c", True)
    dropped = g.remove_entity("b")
    assert {(m.collection, m.member) for m in dropped} == {("a", "b"), ("b", "c")}
    assert list(g.edges()) == []


def random_graph(rng, max_nodes=30):
    n = rng.randint(1, max_nodes)
    ids = [f"n{k}" for k in range(n)]
    colls = set(rng.sample(ids, k=rng.randint(1, n)))
    g = make_graph(ids, colls)
    for c in colls:
        for m in rng.sample(ids, k=rng.randint(0, min(n, 4))):
            if m != c and not g.has_edge(c, m):
                g.add_edge(c, m, rng.random() < 0.6)
    return g, ids, colls


def brute_paths(g, ids, enabled_only):
    """Reachability by enumerating edge sequences up to length n (no closure code)."""
    edges = [(m.collection, m.member) for m in g.edges() if m.enabled or not enabled_only]
    reach = {(a, b) for a, b in edges}
    for _ in range(len(ids)):
        grown = reach | {(a, d) for (a, b), (c, d) in itertools.product(reach, edges) if b == c}
        if grown == reach:
            break
        reach = grown
    return reach


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_closure_matches_fixpoint(seed):
    g, ids, colls = random_graph(random.Random(seed), max_nodes=15)
    for enabled_only in (False, True):
        reach = brute_paths(g, ids, enabled_only)
        for node in ids:
            up = (g.enabled_containing_collections(node) if enabled_only
                  else g.containing_collections(node))
            assert up == {a for a, b in reach if b == node}
            if node in colls:
                down = (g.enabled_recursive_members(node) if enabled_only
                        else g.recursive_members(node))
                assert down == {b for a, b in reach if a == node}
