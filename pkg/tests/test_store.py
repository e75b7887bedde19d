import pytest

from broac import ALL_SPEC, InvalidAbilityError, Permission, Spec, ValidationError, World
from broac.store import ALL, ONE, SOME, GlobalPermission, level_of

EXPECTED_LEVELS = {
    ("One", "One"): 1, ("One", "Some"): 2, ("One", "All"): 3,
    ("Some", "One"): 4, ("Some", "Some"): 5, ("Some", "All"): 6,
    ("All", "One"): 7, ("All", "Some"): 8, ("All", "All"): 9,
}
SHAPES = {"One": ONE, "Some": SOME, "All": ALL}


@pytest.mark.parametrize("pair,level", EXPECTED_LEVELS.items())
def test_level_table(pair, level):
    assert level_of(SHAPES[pair[0]], SHAPES[pair[1]]) == level


def test_levels_are_a_bijection():
    assert sorted(level_of(s, o) for s in SHAPES.values() for o in SHAPES.values()) == list(range(1, 10))


@pytest.fixture
def populated():
    w = World()
    w.create_entity("Person", id="alice")
    w.create_entity("Group", id="staff")
    w.create_entity("Collection", id="folder")
    w.create_entity("TextDocument", id="doc")
    w.add_membership("staff", "alice")
    w.add_membership("folder", "doc")
    return w


def test_kind_and_level(populated):
    p = Permission(Spec.some("staff"), ALL_SPEC, "view Item.name", True)
    assert (p.kind, p.level) == ("SomeToAll", 6)
    g = GlobalPermission(Spec.one("alice"), "create Person", False)
    assert (g.kind, g.level) == ("One", 1)


def test_uniqueness_replaces_sign(populated):
    store = populated.store
    before = len(store.item_permissions())
    key = (Spec.one("alice"), Spec.one("doc"), "edit Item.name")
    store.put(Permission(*key, True))
    store.put(Permission(*key, False))
    assert len(store.item_permissions()) == before + 1
    assert store.get(*key).allowed is False
    assert store.discard(*key).allowed is False
    assert store.get(*key) is None


def test_subject_and_object_validation(populated):
    store = populated.store
    with pytest.raises(ValidationError):
        store.check_subject(Spec.one("doc"))      # not an agent
    with pytest.raises(ValidationError):
        store.check_subject(Spec.some("alice"))   # not a collection
    with pytest.raises(ValidationError):
        store.check_object(Spec.some("doc"))
    store.check_object(Spec.one("staff"))


def test_relevance_uses_enabled_paths_on_object_side(populated):
    w = populated
    w.create_entity("Collection", id="other")
    w.add_membership("other", "doc", enabled=False)
    w.create_entity("Group", id="ghosts")
    w.add_membership("ghosts", "alice", enabled=False)
    store = w.store
    store.put(Permission(Spec.some("ghosts"), Spec.some("other"), "view Item.name", True))
    store.put(Permission(Spec.some("ghosts"), Spec.some("folder"), "view Item.name", True))
    hits = store.relevant_item_permissions("alice", "doc", "view Item.name")
    # subject side ignores the flag, object side honours it
    assert [p.object for p, _ in hits] == [Spec.some("folder")]


def test_relevance_includes_do_anything(populated):
    store = populated.store
    store.put(Permission(Spec.one("alice"), Spec.one("doc"), "do_anything", True))
    abilities = {p.ability for p, _ in store.relevant_item_permissions("alice", "doc", "edit Item.name")}
    assert abilities == {"do_anything"}


def test_inapplicable_ability_rejected(populated):
    with pytest.raises(InvalidAbilityError):
        populated.store.relevant_item_permissions("alice", "doc", "modify_membership")


def test_purge_entity(populated):
    store = populated.store
    store.put(Permission(Spec.one("alice"), Spec.one("doc"), "view Item.name", True))
    store.put(Permission(Spec.some("staff"), Spec.some("folder"), "view Item.name", True))
    store.put_global(GlobalPermission(Spec.one("alice"), "create Person", True))
    removed = store.purge_entity("alice")
    assert removed >= 2
    assert all("alice" not in (p.subject.target, p.object.target) for p in store.item_permissions())
    assert store.global_permissions() == []
