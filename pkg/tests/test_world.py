import pytest

from broac import ALL_SPEC, AuthorizationError, Spec, ValidationError, World


@pytest.fixture
def site():
    w = World()
    w.create_entity("Person", id="owner")
    w.create_entity("Person", id="mallory")
    w.set_global_permission(ALL_SPEC, "create Collection", True)
    w.create_entity("TextDocument", id="diary", creator="owner")
    return w


def test_creator_gets_do_anything(site):
    (p,) = [p for p in site.store.item_permissions() if p.object == Spec.one("diary")]
    assert (p.subject, p.ability, p.allowed, p.level) == (Spec.one("owner"), "do_anything", True, 1)


def test_guarded_create_needs_global_ability(site):
    coll = site.create_entity("Collection", "mallory")
    assert site.entity(coll).creator == "mallory"
    with pytest.raises(AuthorizationError):
        site.create_entity("TextDocument", "mallory")
    with pytest.raises(ValidationError):
        site.create_entity("Collection", "mallory", creator="owner")


def test_fresh_ids_do_not_collide(site):
    site.create_entity("Collection", id="collection-1")
    assert site.create_entity("Collection") == "collection-2"


def test_permission_guards(site):
    with pytest.raises(AuthorizationError):
        site.set_permission(Spec.one("mallory"), Spec.one("diary"), "view Item.name", True, "mallory")
    site.set_permission(Spec.one("mallory"), Spec.one("diary"), "view Item.name", True, "owner")
    with pytest.raises(AuthorizationError):
        site.set_permission(Spec.one("owner"), ALL_SPEC, "view Item.name", True, "owner")
    with pytest.raises(AuthorizationError):
        site.set_global_permission(Spec.one("owner"), "create Person", True, "owner")
    with pytest.raises(AuthorizationError):
        site.delete_permission(Spec.one("mallory"), Spec.one("diary"), "view Item.name", "mallory")
    assert site.delete_permission(Spec.one("mallory"), Spec.one("diary"), "view Item.name", "owner")


def test_guarded_membership_is_disabled_without_power(site):
    loot = site.create_entity("Collection", "mallory")
    edge = site.add_membership(loot, "diary", "mallory")
    assert not edge.enabled
    with pytest.raises(AuthorizationError):
        site.set_permission_enabled(loot, "diary", True, "mallory")
    assert site.set_permission_enabled(loot, "diary", True, "owner").enabled


def test_membership_requires_modify_or_self(site):
    site.create_entity("Group", id="club")
    with pytest.raises(AuthorizationError):
        site.add_membership("club", "mallory", "mallory")
    site.set_permission(ALL_SPEC, Spec.one("club"), "add_self", True)
    site.add_membership("club", "mallory", "mallory")
    with pytest.raises(AuthorizationError):
        site.add_membership("club", "owner", "mallory")
    with pytest.raises(AuthorizationError):
        site.remove_membership("club", "mallory", "mallory")
    site.set_permission(ALL_SPEC, Spec.one("club"), "remove_self", True)
    site.remove_membership("club", "mallory", "mallory")
    assert not site.graph.has_edge("club", "mallory")


def test_delete_cascades(site):
    site.create_entity("Collection", id="box")
    site.add_membership("box", "diary")
    with pytest.raises(AuthorizationError):
        site.delete_entity("diary", "mallory")
    site.set_permission(Spec.one("owner"), Spec.one("diary"), "delete", True)
    site.delete_entity("diary", "owner")
    assert "diary" not in site.graph
    assert not any(p.object == Spec.one("diary") for p in site.store.item_permissions())
    with pytest.raises(ValidationError):
        site.delete_entity("anonymous")


def test_unknown_abilities_rejected(site):
    with pytest.raises(ValidationError):
        site.set_permission(Spec.one("owner"), Spec.one("diary"), "fly", True)
    with pytest.raises(ValidationError):
        site.set_global_permission(Spec.one("owner"), "create Spaceship", True)
    with pytest.raises(ValidationError):
        site.set_permission(Spec.one("diary"), Spec.one("diary"), "view Item.name", True)


def test_anonymous_has_no_default_permission():
    w = World()
    assert w.anonymous == "anonymous"
    assert w.store.item_permissions() == []
    assert World(anonymous=False).anonymous is None
