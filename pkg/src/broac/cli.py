"""Command-line entry point.

Exit codes: 0 clean run (or an allowed single check), 1 a single check was
denied / a run had unmet expectations / loopholes or divergences were found,
2 parse or reference error, 3 authorization failure on a guarded mutation.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from .bootstrap import load_deme_types
from .errors import AuthorizationError, BroacError, ScenarioSyntaxError
from .scenario import (
    ScenarioError,
    format_decision,
    format_lint,
    format_permission,
    iter_execute,
    parse_scenario,
)
from .world import World

EXIT_OK, EXIT_DENIED, EXIT_INVALID, EXIT_UNAUTHORIZED = 0, 1, 2, 3


def _world(args) -> World:
    world = World()
    if getattr(args, "deme_types", False):
        load_deme_types(world)
    return world


def _load(args, echo: bool) -> World:
    """Parse and run the scenario file, printing query outputs when ``echo``."""
    text = Path(args.file).read_text(encoding="utf-8")
    directives = parse_scenario(text)
    world = _world(args)
    unmet = 0
    for out in iter_execute(directives, world):
        if echo:
            print(out.text)
        unmet += not out.matched
    args.unmet = unmet
    return world


def cmd_run(args) -> int:
    _load(args, echo=True)
    return EXIT_DENIED if args.unmet else EXIT_OK


def cmd_check(args) -> int:
    world = _load(args, echo=False)
    decision = world.check(args.agent, args.item, args.ability)
    print(format_decision(decision))
    return EXIT_OK if decision.allowed else EXIT_DENIED


def cmd_explain(args) -> int:
    world = _load(args, echo=False)
    decision = world.explain(args.agent, args.item, args.ability)
    print(format_decision(decision))
    for c in decision.candidates:
        print(f"    [{c.level}] {format_permission(c.permission)}")
    return EXIT_OK


def cmd_lint(args) -> int:
    """Scan every agent/item pair for abilities that carry a deny somewhere."""
    world = _load(args, echo=False)
    abilities = args.ability or sorted(
        {p.ability for p in world.store.item_permissions() if not p.allowed}
    )
    flagged = 0
    for agent in sorted(world.agents()):
        if agent == world.anonymous:
            continue
        for entity in sorted(world.items(), key=lambda e: e.id):
            for ability in abilities:
                if not world.registry.is_item_ability(entity.type, ability):
                    continue
                report = world.lint(agent, entity.id, ability)
                if report.flagged:
                    flagged += 1
                    print(f'{agent} {entity.id} "{ability}": {format_lint(report)}')
    print(f"{flagged} loophole(s)")
    return EXIT_DENIED if flagged else EXIT_OK


def _sizes(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid size list {text!r}") from None


def cmd_bench(args) -> int:
    from .bench import run_scaling_benchmark
    from .generate import WorldGenParams

    params = WorldGenParams(
        users=args.sizes[0],
        items_per_user=args.items_per_user,
        permissions_per_user=args.permissions_per_user,
        seed=args.seed,
        anonymous_visible_fraction=args.visible_fraction,
    )
    timer = time.thread_time_ns if args.clock == "cpu" else time.perf_counter_ns
    report = run_scaling_benchmark(args.sizes, params, reps=args.reps, timer=timer)
    print(report.format_table())
    if args.json:
        Path(args.json).write_text(report.to_json() + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_fuzz(args) -> int:
    import random

    from .generate import FUZZ_ABILITIES, small_world
    from .oracle import divergences

    rng = random.Random(args.seed)
    found = 0
    for trial in range(args.trials):
        seed = rng.getrandbits(32)
        diffs = divergences(small_world(seed), FUZZ_ABILITIES)
        for d in diffs[:5]:
            print(f"world seed {seed}: {d}")
        found += len(diffs)
    print(f"{args.trials} worlds, {found} divergence(s)")
    return EXIT_DENIED if found else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="broac", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_command(name, func, help, query=False):
        p = sub.add_parser(name, help=help)
        p.add_argument("file")
        p.add_argument("--deme-types", action="store_true",
                       help="preload the full Deme item-type hierarchy")
        if query:
            p.add_argument("--agent", required=True)
            p.add_argument("--item", required=True)
            p.add_argument("--ability", required=True)
        p.set_defaults(func=func)
        return p

    scenario_command("run", cmd_run, "execute a scenario and print query results")
    scenario_command("check", cmd_check, "single decision; exit code carries the verdict", query=True)
    scenario_command("explain", cmd_explain, "decision with its full candidate trace", query=True)
    lint = scenario_command("lint", cmd_lint, "report anonymous-access loopholes")
    lint.add_argument("--ability", action="append",
                      help="ability to scan (repeatable; default: every denied ability)")

    bench = sub.add_parser("bench", help="scaling benchmark of filtered item queries")
    bench.add_argument("--sizes", type=_sizes, default=list(range(10, 101, 10)),
                       help="comma-separated user counts (default 10,20,...,100)")
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--reps", type=int, default=100,
                       help="timed runs per size and query (default 100)")
    bench.add_argument("--items-per-user", type=int, default=12)
    bench.add_argument("--permissions-per-user", type=int, default=24)
    bench.add_argument("--visible-fraction", type=float, default=0.5)
    bench.add_argument("--clock", choices=("cpu", "wall"), default="cpu")
    bench.add_argument("--json", help="write the machine-readable report here")
    bench.set_defaults(func=cmd_bench)

    fuzz = sub.add_parser("fuzz", help="compare resolver and oracle on random worlds")
    fuzz.add_argument("--trials", type=int, default=1000)
    fuzz.add_argument("--seed", type=int, default=0)
    fuzz.set_defaults(func=cmd_fuzz)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except ScenarioSyntaxError as exc:
        print(f"{args.file}:{exc}", file=sys.stderr)
        return EXIT_INVALID
    except ScenarioError as exc:
        print(f"{args.file}:{exc}", file=sys.stderr)
        return EXIT_UNAUTHORIZED if isinstance(exc.cause, AuthorizationError) else EXIT_INVALID
    except AuthorizationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNAUTHORIZED
    except (BroacError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
