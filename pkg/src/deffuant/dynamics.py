"""Event-level opinion dynamics: pair consensus and opinion mutation.

One event ("step") selects a random node and, depending on the scheme,
either mutates it or lets it interact with a random neighbor:

* ``MUTATE_OR_INTERACT`` (default): the chosen node mutates with
  probability given by the profile at its current opinion; otherwise it
  interacts with a uniformly chosen neighbor.
* ``MUTATE_AND_INTERACT``: the pair interaction always happens, then an
  independently chosen node passes the same mutation gate.

Interaction: when the two opinions differ by strictly less than the
tolerance, each moves toward the other by ``mu`` times the gap; ties at
exactly the tolerance do not interact.  A mutation replaces the opinion
with a fresh uniform draw on [0, 1].  Isolated nodes skip the interaction
(their opinions change only via mutation).

``step`` is the pure-Python reference for a single event; ``run`` executes
the same event sequence in a compiled kernel and accumulates the final
window of states into a histogram.  Both consume the random stream
identically, so they agree bit for bit.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _kernels
from .errors import ParamError
from .measure import Histogram
from .network import Graph
from .profiles import MutationProfile, ProfileKind, evaluate
from .rng import Xoshiro256StarStar


class Scheme(Enum):
    MUTATE_OR_INTERACT = "or"
    MUTATE_AND_INTERACT = "and"


class InitKind(Enum):
    UNIFORM_IID = "uniform"
    CONSTANT = "const"
    TWO_DELTA = "twodelta"


@dataclass(frozen=True)
class InitSpec:
    """Initial opinion distribution: i.i.d. uniform, constant, or two-point."""

    kind: InitKind
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if self.kind is not InitKind.UNIFORM_IID:
            for value in (self.a, self.b) if self.kind is InitKind.TWO_DELTA else (self.a,):
                if not 0.0 <= value <= 1.0:
                    raise ParamError(f"initial opinion {value} outside [0, 1]")

    @classmethod
    def uniform(cls) -> "InitSpec":
        return cls(InitKind.UNIFORM_IID)

    @classmethod
    def constant(cls, c: float) -> "InitSpec":
        return cls(InitKind.CONSTANT, a=c)

    @classmethod
    def two_delta(cls, a: float, b: float) -> "InitSpec":
        return cls(InitKind.TWO_DELTA, a=a, b=b)

    @classmethod
    def parse(cls, text: str) -> "InitSpec":
        """Parse `uniform`, `const:<c>`, or `twodelta:<a>,<b>`."""
        if text == "uniform":
            return cls.uniform()
        try:
            if text.startswith("const:"):
                return cls.constant(float(text[len("const:"):]))
            if text.startswith("twodelta:"):
                a, b = text[len("twodelta:"):].split(",")
                return cls.two_delta(float(a), float(b))
        except (ValueError, ParamError) as exc:
            raise ParamError(f"bad init spec {text!r}: {exc}") from None
        raise ParamError(
            f"bad init spec {text!r} (uniform | const:<c> | twodelta:<a>,<b>)"
        )

    def label(self) -> str:
        if self.kind is InitKind.UNIFORM_IID:
            return "uniform"
        if self.kind is InitKind.CONSTANT:
            return f"const:{self.a!r}"
        return f"twodelta:{self.a!r},{self.b!r}"


@dataclass(frozen=True)
class SimConfig:
    """Full description of one simulation run."""

    tolerance: float
    mu: float = 0.5
    total_steps: int = 50_000_000
    window: int = 1000
    scheme: Scheme = Scheme.MUTATE_OR_INTERACT
    init: InitSpec = field(default_factory=InitSpec.uniform)
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.tolerance <= 1.0:
            raise ParamError(f"tolerance {self.tolerance} must be in (0, 1]")
        if not 0.0 < self.mu <= 0.5:
            raise ParamError(f"mu {self.mu} must be in (0, 0.5]")
        if self.total_steps < 1:
            raise ParamError(f"total_steps {self.total_steps} must be positive")
        if not 0 < self.window <= self.total_steps:
            raise ParamError(
                f"window {self.window} must be in [1, total_steps={self.total_steps}]"
            )


@dataclass
class OpinionState:
    """Opinion vector plus the number of events applied so far."""

    opinions: np.ndarray
    step: int = 0

    @property
    def node_count(self) -> int:
        return len(self.opinions)


@dataclass
class RunStats:
    steps: int
    interactions: int
    consensus_events: int
    mutations: int
    elapsed_seconds: float


def init_opinions(n: int, init: InitSpec, rng: Xoshiro256StarStar) -> OpinionState:
    """Draw the initial opinion vector (one stream draw per node except Constant)."""
    if n < 1:
        raise ParamError(f"node count {n} must be positive")
    opinions = np.empty(n, dtype=np.float64)
    if init.kind is InitKind.CONSTANT:
        opinions.fill(init.a)
    elif init.kind is InitKind.UNIFORM_IID:
        for i in range(n):
            opinions[i] = rng.uniform01()
    else:
        for i in range(n):
            opinions[i] = init.a if rng.uniform01() < 0.5 else init.b
    return OpinionState(opinions=opinions, step=0)


def pair_update(o_a: float, o_b: float, d: float, mu: float) -> tuple[float, float]:
    """Consensus rule for one interacting pair.

    When |o_a - o_b| < d (strict), both opinions move ``mu`` of the gap
    toward each other; the pair sum is conserved and the gap shrinks by the
    factor |1 - 2 mu|.  With mu = 0.5 both land exactly on the midpoint.
    Out-of-tolerance pairs are returned unchanged.
    """
    diff = o_a - o_b
    if -d < diff < d:
        if mu == 0.5:
            mid = 0.5 * (o_a + o_b)
            return mid, mid
        shift = mu * diff
        return o_a - shift, o_b + shift
    return o_a, o_b


def mutate(state: OpinionState, node: int, rng: Xoshiro256StarStar) -> OpinionState:
    """Replace one node's opinion with a fresh uniform draw (in place)."""
    state.opinions[node] = rng.uniform01()
    return state


def step(
    state: OpinionState,
    g: Graph,
    cfg: SimConfig,
    profile: MutationProfile,
    rng: Xoshiro256StarStar,
) -> OpinionState:
    """Advance exactly one event (reference path; see module docstring).

    Matches the compiled loop in `run` draw for draw.
    """
    opinions = state.opinions
    n = state.node_count
    a = rng.randbelow(n)
    if cfg.scheme is Scheme.MUTATE_OR_INTERACT:
        gate = rng.uniform01()
        if gate < evaluate(profile, opinions[a]):
            mutate(state, a, rng)
        else:
            b = _draw_neighbor(g, a, rng)
            if b is not None:
                opinions[a], opinions[b] = pair_update(
                    opinions[a], opinions[b], cfg.tolerance, cfg.mu
                )
    else:
        b = _draw_neighbor(g, a, rng)
        if b is not None:
            opinions[a], opinions[b] = pair_update(
                opinions[a], opinions[b], cfg.tolerance, cfg.mu
            )
        c = rng.randbelow(n)
        gate = rng.uniform01()
        if gate < evaluate(profile, opinions[c]):
            mutate(state, c, rng)
    state.step += 1
    return state


def _draw_neighbor(g: Graph, u: int, rng: Xoshiro256StarStar) -> int | None:
    lo = int(g.offsets[u])
    deg = int(g.offsets[u + 1]) - lo
    if deg == 0:
        return None
    return int(g.neighbors[lo + rng.randbelow(deg)])


_KIND_CODE = {
    ProfileKind.UNIFORM: _kernels.KIND_UNIFORM,
    ProfileKind.ASYMMETRIC_LINEAR: _kernels.KIND_ASYMMETRIC_LINEAR,
    ProfileKind.SYMMETRIC_TENT: _kernels.KIND_SYMMETRIC_TENT,
}

_SCHEME_CODE = {
    Scheme.MUTATE_OR_INTERACT: _kernels.SCHEME_MUTATE_OR_INTERACT,
    Scheme.MUTATE_AND_INTERACT: _kernels.SCHEME_MUTATE_AND_INTERACT,
}


def run(
    g: Graph,
    cfg: SimConfig,
    profile: MutationProfile,
    bins: int = 200,
) -> tuple[OpinionState, Histogram, RunStats]:
    """Run ``cfg.total_steps`` events from a fresh seeded state.

    The random stream is seeded from ``cfg.seed``; the initial opinions
    consume the first draws, the event loop the rest.  After each of the
    final ``cfg.window`` events the full opinion vector is added to the
    returned histogram (node_count * window samples total).  Deterministic:
    identical (g, cfg, profile, bins) give bit-identical results.
    """
    started = time.perf_counter()
    rng = Xoshiro256StarStar(cfg.seed)
    state = init_opinions(g.node_count, cfg.init, rng)
    hist = Histogram.empty(bins)
    kernel_state = rng.state_array()
    interactions, consensus, mutations = _kernels.run_events(
        g.offsets,
        g.neighbors,
        state.opinions,
        cfg.tolerance,
        cfg.mu,
        cfg.total_steps,
        cfg.window,
        _SCHEME_CODE[cfg.scheme],
        _KIND_CODE[profile.kind],
        profile.base_rate,
        profile.slope,
        bins,
        hist.counts,
        kernel_state,
    )
    rng.set_state_array(kernel_state)
    state.step = cfg.total_steps
    hist.samples = int(hist.counts.sum())
    stats = RunStats(
        steps=cfg.total_steps,
        interactions=int(interactions),
        consensus_events=int(consensus),
        mutations=int(mutations),
        elapsed_seconds=time.perf_counter() - started,
    )
    return state, hist, stats
