"""Experiment grids over the confidence bound, with replicate averaging.

A sweep runs R independently generated networks ("replicates") across M
tolerance values.  One network per replicate is reused for the whole
tolerance grid; every task restarts from fresh initial opinions, making
all R x M tasks independent and schedulable in any order.

Seeding is fully deterministic: every stream seed is derived from the
plan's master seed by `derive_seed`, so the assembled map is byte-identical
for any worker count, including 1.  Tasks run on a thread pool; the
compiled event loop releases the GIL, so threads scale without any shared
mutable state.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple

import numpy as np

from . import _kernels
from .dynamics import RunStats, SimConfig, run
from .errors import ParamError, SweepError
from .measure import FLOAT_FORMAT, Histogram, merge
from .network import Graph, generate_er
from .profiles import MutationProfile
from .rng import GOLDEN_GAMMA, Xoshiro256StarStar, mix64

# Stream tags separate the independent random streams hanging off one
# master seed.
STREAM_NETWORK = 1
STREAM_DYNAMICS = 2

_MASK64 = (1 << 64) - 1


def derive_seed(master: int, replicate_index: int, d_index: int, stream_tag: int) -> int:
    """Mix (master, replicate, d_index, stream_tag) into one 64-bit seed.

    Absorbs each field through the splitmix64 finalizer (an avalanche
    bijection with multipliers 0xBF58476D1CE4E5B9 / 0x94D049BB133111EB and
    increment 0x9E3779B97F4A7C15): h <- mix64(h + gamma + field).  Distinct
    tuples collide only with probability ~2**-64 per pair.
    """
    h = master & _MASK64
    for value in (replicate_index, d_index, stream_tag):
        h = mix64((h + GOLDEN_GAMMA + value) & _MASK64)
    return h


class NetParams(NamedTuple):
    n: int
    avg_degree: float


@dataclass(frozen=True)
class SweepTask:
    replicate_index: int
    d_index: int
    d_value: float
    seed: int  # dynamics stream seed


@dataclass(frozen=True)
class SweepPlan:
    """Everything needed to reproduce a full bifurcation experiment."""

    d_start: float
    d_end: float
    d_step: float
    replicates: int
    base_config: SimConfig  # tolerance and seed are overridden per task
    net_params: NetParams
    profile: MutationProfile
    master_seed: int
    bins: int = 200

    def __post_init__(self):
        if self.d_step <= 0:
            raise ParamError(f"d_step {self.d_step} must be positive")
        if self.d_start > self.d_end:
            raise ParamError(
                f"empty grid: d_start {self.d_start} > d_end {self.d_end}"
            )
        if self.replicates < 1:
            raise ParamError(f"replicates {self.replicates} must be at least 1")

    def d_values(self) -> np.ndarray:
        # floor() on the exact real ratio; the epsilon absorbs float noise
        # in (d_end - d_start) / d_step for grids specified in decimals.
        m = int(math.floor((self.d_end - self.d_start) / self.d_step + 1e-9)) + 1
        return self.d_start + self.d_step * np.arange(m)


@dataclass
class BifurcationMap:
    """Replicate-averaged densities, one row per tolerance value."""

    d_values: np.ndarray  # float64[M]
    densities: np.ndarray  # float64[M, bins]


def plan_tasks(plan: SweepPlan) -> list[SweepTask]:
    """Expand the plan's R x M grid into seeded tasks.

    Tasks sharing a replicate index share that replicate's network; the
    dynamics seed differs per (replicate, d_index).
    """
    d_values = plan.d_values()
    tasks = []
    for rep in range(plan.replicates):
        for j, d in enumerate(d_values):
            tasks.append(
                SweepTask(
                    replicate_index=rep,
                    d_index=j,
                    d_value=float(d),
                    seed=derive_seed(plan.master_seed, rep, j, STREAM_DYNAMICS),
                )
            )
    return tasks


def replicate_network_seed(plan: SweepPlan, replicate_index: int) -> int:
    return derive_seed(plan.master_seed, replicate_index, 0, STREAM_NETWORK)


def generate_networks(plan: SweepPlan) -> list[Graph]:
    """Generate the per-replicate networks (one stream per replicate)."""
    graphs = []
    for rep in range(plan.replicates):
        rng = Xoshiro256StarStar(replicate_network_seed(plan, rep))
        graphs.append(generate_er(plan.net_params.n, plan.net_params.avg_degree, rng))
    return graphs


def execute(
    plan: SweepPlan,
    parallelism: int = 1,
    progress: Callable[[int, int], None] | None = None,
) -> tuple[BifurcationMap, list[RunStats]]:
    """Run every task and assemble the replicate-averaged map.

    Per-tolerance histograms are merged across replicates by exact count
    sums, then normalized; results are written into an index-addressed
    table, so completion order (and therefore ``parallelism``) cannot
    affect the output.  A failing task aborts the sweep with its grid
    coordinates.
    """
    if parallelism < 1:
        raise ParamError(f"parallelism {parallelism} must be at least 1")
    graphs = generate_networks(plan)
    tasks = plan_tasks(plan)
    d_values = plan.d_values()
    m = len(d_values)

    histograms: list[list[Histogram | None]] = [
        [None] * plan.replicates for _ in range(m)
    ]
    stats_table: list[list[RunStats | None]] = [
        [None] * plan.replicates for _ in range(m)
    ]

    _kernels.warm_up()  # compile before the pool; first JIT is not thread-safe cheap

    done = 0

    def run_task(task: SweepTask) -> None:
        try:
            cfg = replace(plan.base_config, tolerance=task.d_value, seed=task.seed)
            _, hist, stats = run(
                graphs[task.replicate_index], cfg, plan.profile, bins=plan.bins
            )
        except Exception as exc:
            raise SweepError(str(exc), task.replicate_index, task.d_index) from exc
        histograms[task.d_index][task.replicate_index] = hist
        stats_table[task.d_index][task.replicate_index] = stats

    if parallelism == 1:
        for task in tasks:
            run_task(task)
            done += 1
            if progress is not None:
                progress(done, len(tasks))
    else:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            futures = [pool.submit(run_task, task) for task in tasks]
            for future in as_completed(futures):
                future.result()  # re-raises SweepError from the task
                done += 1
                if progress is not None:
                    progress(done, len(tasks))

    densities = np.empty((m, plan.bins), dtype=np.float64)
    for j in range(m):
        merged = histograms[j][0]
        for rep in range(1, plan.replicates):
            merged = merge(merged, histograms[j][rep])
        densities[j] = merged.density()
    task_stats = [
        stats_table[t.d_index][t.replicate_index] for t in tasks
    ]
    return BifurcationMap(d_values=d_values, densities=densities), task_stats


def write_bifurcation_csv(bif: BifurcationMap, sink) -> None:
    """Emit `bin_center,d=<v>,...` with one density column per tolerance."""
    header = "bin_center," + ",".join(f"d={d:.3f}" for d in bif.d_values)
    sink.write(header + "\n")
    m, bins = bif.densities.shape
    centers = (np.arange(bins) + 0.5) / bins
    for i in range(bins):
        row = [FLOAT_FORMAT.format(centers[i])]
        row.extend(FLOAT_FORMAT.format(bif.densities[j, i]) for j in range(m))
        sink.write(",".join(row) + "\n")


def read_bifurcation_csv(source) -> BifurcationMap:
    """Parse a bifurcation CSV back into (d_values, densities)."""
    from .errors import ParseError

    header = source.readline().strip()
    columns = header.split(",")
    if len(columns) < 2 or columns[0] != "bin_center" or not all(
        c.startswith("d=") for c in columns[1:]
    ):
        raise ParseError(f"expected 'bin_center,d=...', got {header!r}", 1)
    d_values = np.array([float(c[2:]) for c in columns[1:]])
    rows = []
    for lineno, raw in enumerate(source, start=2):
        line = raw.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != len(columns):
            raise ParseError(
                f"expected {len(columns)} columns, got {len(parts)}", lineno
            )
        try:
            rows.append([float(x) for x in parts[1:]])
        except ValueError:
            raise ParseError(f"non-numeric value in {line!r}", lineno) from None
    if not rows:
        raise ParseError("no data rows", 2)
    return BifurcationMap(
        d_values=d_values, densities=np.array(rows, dtype=np.float64).T
    )
