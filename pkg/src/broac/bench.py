"""Scaling benchmark for permission-filtered item queries.

For each site size the benchmark builds a world, then times two queries over
the full item table: one returning every item, and one returning only the
items whose name the anonymous agent may view. Each point is the mean of
``reps`` timed runs; world construction and the untimed run that precedes
every timed one are excluded. Both series are fitted against item count by
least squares.
"""

from __future__ import annotations

import gc
import json
import math
import random
import statistics
import time
from dataclasses import asdict, dataclass, replace
from typing import Callable, NamedTuple, Sequence

from .generate import WorldGenParams, random_world
from .world import World

VIEW_NAME = "view Item.name"


class ItemRow(NamedTuple):
    id: str
    type: str
    creator: str | None


def query_all_items(world: World) -> list[ItemRow]:
    return [ItemRow(e.id, e.type, e.creator) for e in world.graph.entities.values()]


def query_visible_items(world: World, agent: str, ability: str = VIEW_NAME) -> list[ItemRow]:
    entities = world.graph.entities
    return [
        ItemRow(e.id, e.type, e.creator)
        for e in map(entities.__getitem__, world.filter_items(agent, ability))
    ]


@dataclass(frozen=True)
class Fit:
    slope: float
    intercept: float
    r_squared: float


def fit_line(xs: Sequence[float], ys: Sequence[float]) -> Fit:
    if len(xs) != len(ys):
        raise ValueError("xs and ys differ in length")
    if len(set(xs)) < 2:
        raise ValueError("a line fit needs at least two distinct x values")
    slope, intercept = statistics.linear_regression(xs, ys)
    mean_y = statistics.fmean(ys)
    ss_tot = sum((y - mean_y) ** 2 for y in ys)
    ss_res = sum((y - (slope * x + intercept)) ** 2 for x, y in zip(xs, ys))
    r_squared = 1.0 if ss_tot == 0 else max(0.0, 1.0 - ss_res / ss_tot)
    return Fit(slope, intercept, r_squared)


@dataclass(frozen=True)
class BenchPoint:
    users: int
    item_count: int
    visible: int
    t_filtered_ns: float
    t_unfiltered_ns: float


@dataclass(frozen=True)
class BenchReport:
    points: tuple[BenchPoint, ...]
    filtered: Fit
    unfiltered: Fit
    reps: int

    @property
    def overhead_ratio(self) -> float:
        """Marginal per-item cost of the filtered query over the unfiltered one.

        NaN when the unfiltered series does not grow with item count.
        """
        if self.unfiltered.slope <= 0:
            return math.nan
        return self.filtered.slope / self.unfiltered.slope

    def to_json(self) -> str:
        ratio = self.overhead_ratio
        return json.dumps(
            {
                "reps": self.reps,
                "points": [asdict(p) for p in self.points],
                "fit": {
                    "filtered": asdict(self.filtered),
                    "unfiltered": asdict(self.unfiltered),
                    "overhead_ratio": None if math.isnan(ratio) else ratio,
                },
            },
            indent=2,
        )

    def format_table(self) -> str:
        lines = [f"{'users':>6} {'items':>7} {'visible':>8} {'filtered_ns':>13} {'unfiltered_ns':>14}"]
        for p in self.points:
            lines.append(
                f"{p.users:>6} {p.item_count:>7} {p.visible:>8} "
                f"{p.t_filtered_ns:>13.0f} {p.t_unfiltered_ns:>14.0f}"
            )
        for name, fit in (("filtered", self.filtered), ("unfiltered", self.unfiltered)):
            lines.append(
                f"{name}: {fit.slope:.1f} ns/item, intercept {fit.intercept:.0f} ns, "
                f"R^2 {fit.r_squared:.4f}"
            )
        lines.append(f"overhead ratio (filtered/unfiltered slope): {self.overhead_ratio:.2f}")
        return "\n".join(lines)


def run_scaling_benchmark(
    sizes: Sequence[int],
    params: WorldGenParams | None = None,
    reps: int = 100,
    timer: Callable[[], int] = time.thread_time_ns,
) -> BenchReport:
    """Time both queries on one world per size and fit each series.

    Each round runs every (size, query) pair once in a fresh shuffled order,
    so slow periods of the host and the cache state left by the previous run
    spread over every point instead of bending one end of the line. The
    default clock is the thread's CPU time (monotonic, and blind to time spent
    descheduled); pass ``time.perf_counter_ns`` for wall-clock timings.
    """
    if not sizes:
        raise ValueError("sizes must not be empty")
    if len(sizes) < 2:
        raise ValueError("a linear fit needs at least two sizes")
    if list(sizes) != sorted(sizes) or len(set(sizes)) != len(sizes):
        raise ValueError("sizes must be strictly ascending")
    if reps < 1:
        raise ValueError("reps must be positive")
    base = params if params is not None else WorldGenParams(users=sizes[0])

    worlds = [random_world(replace(base, users=users)) for users in sizes]
    visible = []
    for world in worlds:
        # warm-up run, also fills the closure caches
        visible.append(len(query_visible_items(world, world.anonymous)))
        query_all_items(world)

    queries = {
        True: lambda world: query_visible_items(world, world.anonymous),
        False: query_all_items,
    }
    totals = {True: [0] * len(worlds), False: [0] * len(worlds)}
    runs = [(k, filtered) for k in range(len(worlds)) for filtered in (True, False)]
    rng = random.Random(base.seed)
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(reps):
            rng.shuffle(runs)
            for k, filtered in runs:
                world = worlds[k]
                query = queries[filtered]
                query(world)  # untimed: every timed run starts from the same warm cache
                # the result stays referenced until the clock stops; freeing is not querying
                start = timer()
                rows = query(world)
                totals[filtered][k] += timer() - start
                del rows
    finally:
        if gc_was_enabled:
            gc.enable()

    points = tuple(
        BenchPoint(users, len(world.graph.entities), seen, f / reps, u / reps)
        for users, world, seen, f, u in zip(sizes, worlds, visible, totals[True], totals[False])
    )
    xs = [p.item_count for p in points]
    return BenchReport(
        points,
        fit_line(xs, [p.t_filtered_ns for p in points]),
        fit_line(xs, [p.t_unfiltered_ns for p in points]),
        reps,
    )
