"""The packaged Deme type hierarchy."""

from __future__ import annotations

from importlib import resources

from .scenario import execute, parse_scenario
from .world import World


def deme_types_text() -> str:
    return resources.files("broac").joinpath("data/deme_types.scn").read_text(encoding="utf-8")


def load_deme_types(world: World) -> World:
    execute(parse_scenario(deme_types_text()), world)
    return world
