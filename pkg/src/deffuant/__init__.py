"""Deffuant bounded-confidence opinion dynamics with opinion-dependent mutation.

A deterministic simulation engine for continuous opinions on random networks:
agents interact pairwise under a confidence bound and occasionally replace
their opinion with a fresh uniform draw, at a rate that may depend on the
opinion held.  Includes an Erdos-Renyi graph generator, steady-state
histogram/peak analysis, and a seeded parallel sweep harness that produces
bifurcation maps over the confidence bound.
"""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    ParamError,
    ParseError,
    RangeError,
    ShapeError,
    SweepError,
)
from .profiles import MutationProfile, ProfileKind, evaluate, mean_rate, validate
from .network import Graph, degree_stats, generate_er, random_neighbor
from .dynamics import (
    InitSpec,
    OpinionState,
    RunStats,
    Scheme,
    SimConfig,
    init_opinions,
    mutate,
    pair_update,
    run,
    step,
)
from .measure import (
    Histogram,
    Peak,
    PeakSet,
    accumulate,
    detect_peaks,
    l1_distance,
    merge,
    symmetry_l1,
)
from .sweep import BifurcationMap, SweepPlan, derive_seed, execute, plan_tasks
from .rng import Xoshiro256StarStar

__all__ = [
    "BifurcationMap",
    "DomainError",
    "Graph",
    "Histogram",
    "InitSpec",
    "MutationProfile",
    "OpinionState",
    "ParamError",
    "ParseError",
    "Peak",
    "PeakSet",
    "ProfileKind",
    "RangeError",
    "RunStats",
    "Scheme",
    "ShapeError",
    "SimConfig",
    "SweepError",
    "SweepPlan",
    "Xoshiro256StarStar",
    "accumulate",
    "degree_stats",
    "derive_seed",
    "detect_peaks",
    "evaluate",
    "execute",
    "generate_er",
    "init_opinions",
    "l1_distance",
    "mean_rate",
    "merge",
    "mutate",
    "pair_update",
    "plan_tasks",
    "random_neighbor",
    "run",
    "step",
    "symmetry_l1",
    "validate",
]
