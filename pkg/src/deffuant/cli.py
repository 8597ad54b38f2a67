"""Command-line entry point: run, sweep, gen-net, and peaks commands.

All file emission lives here.  Every run writes a `meta.txt` next to its
data files recording the full resolved configuration as `key = value`
lines (flag names, `#` comments for informational extras), so a metadata
file doubles as a config file: `deffuant run --config meta.txt` reproduces
the data files byte for byte.  Explicit flags override config-file values,
which override the built-in defaults.

Exit codes: 0 success, 2 flag/validation/parse errors, 1 runtime failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import __version__
from .dynamics import InitSpec, Scheme, SimConfig, run
from .errors import (
    DomainError,
    ParamError,
    ParseError,
    RangeError,
    ShapeError,
    SweepError,
)
from .measure import (
    FLOAT_FORMAT,
    detect_peaks,
    read_distribution_csv,
    write_distribution_csv,
)
from .network import degree_stats, generate_er, write_edge_list
from .profiles import MutationProfile, parse_kind
from .rng import Xoshiro256StarStar
from .sweep import (
    STREAM_DYNAMICS,
    STREAM_NETWORK,
    NetParams,
    SweepPlan,
    derive_seed,
    execute,
    write_bifurcation_csv,
)


class CLIError(Exception):
    """Validation failure reported with exit code 2."""


DEFAULTS = {
    "n": 10000,
    "degree": 10.0,
    "d": 0.1,
    "d-start": 0.1,
    "d-end": 0.75,
    "d-step": 0.005,
    "mu": 0.5,
    "steps": 50_000_000,
    "window": 1000,
    "p": 0.01,
    "alpha": 0.0,
    "profile": "uniform",
    "scheme": "or",
    "init": "uniform",
    "replicates": 10,
    "seed": 1,
    "bins": 200,
    "workers": 1,
    "min-peak-frac": 0.2,
    "min-peak-sep": 9,
    "out": "out",
    "save-state": False,
}

_CONVERTERS = {
    "n": int,
    "degree": float,
    "d": float,
    "d-start": float,
    "d-end": float,
    "d-step": float,
    "mu": float,
    "steps": int,
    "window": int,
    "p": float,
    "alpha": float,
    "profile": str,
    "scheme": str,
    "init": str,
    "replicates": int,
    "seed": int,
    "bins": int,
    "workers": int,
    "min-peak-frac": float,
    "min-peak-sep": int,
    "out": str,
    "save-state": lambda s: s.lower() in ("1", "true", "yes"),
}


def _add_option(parser: argparse.ArgumentParser, key: str, **kwargs) -> None:
    # default=None so explicit flags are distinguishable from defaults
    parser.add_argument(f"--{key}", default=None, dest=key.replace("-", "_"), **kwargs)


def _common_options(parser: argparse.ArgumentParser, keys: list[str]) -> None:
    type_map = {
        "n": int, "steps": int, "window": int, "replicates": int, "seed": int,
        "bins": int, "workers": int, "min-peak-sep": int,
    }
    for key in keys:
        if key == "scheme":
            _add_option(parser, key, choices=["or", "and"])
        elif key == "profile":
            _add_option(parser, key, choices=["uniform", "asym", "sym"])
        elif key == "save-state":
            _add_option(parser, key, action="store_const", const=True)
        elif key in type_map:
            _add_option(parser, key, type=type_map[key])
        elif key in ("init", "out"):
            _add_option(parser, key, type=str)
        else:
            _add_option(parser, key, type=float)
    parser.add_argument("--config", default=None, type=str,
                        help="key = value config file; flags override it")


_RUN_KEYS = ["n", "degree", "d", "mu", "steps", "window", "p", "alpha",
             "profile", "scheme", "init", "seed", "bins", "save-state", "out"]
_SWEEP_KEYS = ["n", "degree", "d-start", "d-end", "d-step", "mu", "steps",
               "window", "p", "alpha", "profile", "scheme", "init",
               "replicates", "seed", "bins", "workers",
               "min-peak-frac", "min-peak-sep", "out"]
_GEN_NET_KEYS = ["n", "degree", "seed", "out"]
_PEAKS_KEYS = ["min-peak-frac", "min-peak-sep", "out"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="deffuant",
        description="Bounded-confidence opinion dynamics with opinion-dependent mutation",
    )
    parser.add_argument("--version", action="version", version=f"deffuant {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="single simulation -> distribution.csv")
    _common_options(p_run, _RUN_KEYS)
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="tolerance sweep -> bifurcation.csv")
    _common_options(p_sweep, _SWEEP_KEYS)
    p_sweep.set_defaults(func=cmd_sweep)

    p_gen = sub.add_parser("gen-net", help="generate a network -> network.edges")
    _common_options(p_gen, _GEN_NET_KEYS)
    p_gen.set_defaults(func=cmd_gen_net)

    p_peaks = sub.add_parser("peaks", help="peak table from a distribution CSV")
    p_peaks.add_argument("csv", type=str, help="distribution CSV path")
    _common_options(p_peaks, _PEAKS_KEYS)
    p_peaks.set_defaults(func=cmd_peaks)
    return parser


def load_config(path: str) -> dict:
    """Parse a flat `key = value` config file (# starts a comment)."""
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CLIError(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CLIError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("_", "-")
        if key not in _CONVERTERS:
            raise CLIError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            values[key] = _CONVERTERS[key](value.strip())
        except ValueError as exc:
            raise CLIError(f"{path}:{lineno}: bad value for {key}: {exc}") from exc
    return values


def resolve(ns: argparse.Namespace, keys: list[str]) -> dict:
    """Merge explicit flags over config-file values over defaults."""
    from_file = load_config(ns.config) if getattr(ns, "config", None) else {}
    resolved = {}
    for key in keys:
        flag_value = getattr(ns, key.replace("-", "_"))
        if flag_value is not None:
            resolved[key] = flag_value
        elif key in from_file:
            resolved[key] = from_file[key]
        else:
            resolved[key] = DEFAULTS[key]
    return resolved


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise CLIError(message)


def _validate_common(r: dict) -> None:
    _require(r["n"] >= 2, "n must be at least 2")
    _require(0.0 <= r["degree"] <= r["n"] - 1,
             f"degree must be in [0, n-1] = [0, {r['n'] - 1}]")


def _validate_dynamics(r: dict) -> None:
    _require(0.0 < r["mu"] <= 0.5, "mu must be in (0, 0.5]")
    _require(r["steps"] >= 1, "steps must be at least 1")
    _require(0 < r["window"] <= r["steps"],
             f"window must be in [1, steps] = [1, {r['steps']}]")
    _require(0.0 <= r["p"] <= 1.0, "p must be in [0, 1]")
    _require(r["bins"] >= 1, "bins must be at least 1")
    if r["profile"] == "uniform":
        _require(r["alpha"] == 0.0, "alpha must be 0 for --profile uniform")


def _validate_peak_flags(r: dict) -> None:
    _require(0.0 < r["min-peak-frac"] <= 1.0, "min-peak-frac must be in (0, 1]")
    _require(r["min-peak-sep"] >= 1, "min-peak-sep must be at least 1")


def _build_profile(r: dict) -> MutationProfile:
    return MutationProfile(kind=parse_kind(r["profile"]), base_rate=r["p"],
                           slope=r["alpha"])


def _out_dir(r: dict) -> Path:
    out = Path(r["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def write_meta(path: Path, command: str, resolved: dict, extras: list[tuple[str, object]]) -> None:
    with open(path, "w") as sink:
        sink.write(f"# tool = deffuant {__version__}\n")
        sink.write(f"# command = {command}\n")
        for key, value in resolved.items():
            if key == "save-state":
                value = "true" if value else "false"
            sink.write(f"{key} = {value}\n")
        for key, value in extras:
            sink.write(f"# {key} = {value}\n")


def cmd_run(ns: argparse.Namespace) -> int:
    r = resolve(ns, _RUN_KEYS)
    _validate_common(r)
    _validate_dynamics(r)
    _require(0.0 < r["d"] <= 1.0, "d must be in (0, 1]")
    profile = _build_profile(r)
    init = InitSpec.parse(r["init"])
    net_seed = derive_seed(r["seed"], 0, 0, STREAM_NETWORK)
    dyn_seed = derive_seed(r["seed"], 0, 0, STREAM_DYNAMICS)
    graph = generate_er(r["n"], r["degree"], Xoshiro256StarStar(net_seed))
    cfg = SimConfig(
        tolerance=r["d"], mu=r["mu"], total_steps=r["steps"], window=r["window"],
        scheme=Scheme(r["scheme"]), init=init, seed=dyn_seed,
    )
    state, hist, stats = run(graph, cfg, profile, bins=r["bins"])

    out = _out_dir(r)
    with open(out / "distribution.csv", "w") as sink:
        write_distribution_csv(hist.density(), sink)
    if r["save-state"]:
        with open(out / "state.csv", "w") as sink:
            sink.write("node,opinion\n")
            for i, x in enumerate(state.opinions):
                sink.write(f"{i},{FLOAT_FORMAT.format(x)}\n")
    write_meta(out / "meta.txt", "run", r, [
        ("network-model", "gnp-binomial"),
        ("seed-network", net_seed),
        ("seed-dynamics", dyn_seed),
        ("events-interactions", stats.interactions),
        ("events-consensus", stats.consensus_events),
        ("events-mutations", stats.mutations),
        ("elapsed-seconds", f"{stats.elapsed_seconds:.3f}"),
    ])
    print(f"run: {stats.steps} events in {stats.elapsed_seconds:.2f}s "
          f"({stats.mutations} mutations, {stats.consensus_events} consensus) "
          f"-> {out / 'distribution.csv'}")
    return 0


def cmd_sweep(ns: argparse.Namespace) -> int:
    r = resolve(ns, _SWEEP_KEYS)
    _validate_common(r)
    _validate_dynamics(r)
    _validate_peak_flags(r)
    _require(r["d-step"] > 0, "d-step must be positive")
    _require(r["d-start"] <= r["d-end"], "d-start must not exceed d-end")
    _require(0.0 < r["d-start"] and r["d-end"] <= 1.0,
             "d grid must lie inside (0, 1]")
    _require(r["replicates"] >= 1, "replicates must be at least 1")
    _require(r["workers"] >= 1, "workers must be at least 1")

    base_cfg = SimConfig(
        tolerance=r["d-start"], mu=r["mu"], total_steps=r["steps"],
        window=r["window"], scheme=Scheme(r["scheme"]),
        init=InitSpec.parse(r["init"]), seed=0,
    )
    plan = SweepPlan(
        d_start=r["d-start"], d_end=r["d-end"], d_step=r["d-step"],
        replicates=r["replicates"], base_config=base_cfg,
        net_params=NetParams(n=r["n"], avg_degree=r["degree"]),
        profile=_build_profile(r), master_seed=r["seed"], bins=r["bins"],
    )

    started = time.perf_counter()

    def progress(done: int, total: int) -> None:
        sys.stderr.write(f"\rtasks {done}/{total}")
        sys.stderr.flush()
        if done == total:
            sys.stderr.write("\n")

    bif, task_stats = execute(plan, parallelism=r["workers"], progress=progress)
    elapsed = time.perf_counter() - started

    out = _out_dir(r)
    with open(out / "bifurcation.csv", "w") as sink:
        write_bifurcation_csv(bif, sink)
    with open(out / "peaks.csv", "w") as sink:
        sink.write("d,n_peaks,locations\n")
        for j, d in enumerate(bif.d_values):
            peak_set = detect_peaks(bif.densities[j], r["min-peak-frac"],
                                    r["min-peak-sep"])
            locations = ";".join(FLOAT_FORMAT.format(p.location)
                                 for p in peak_set.peaks)
            sink.write(f"{d:.3f},{peak_set.count},{locations}\n")
    write_meta(out / "meta.txt", "sweep", r, [
        ("network-model", "gnp-binomial"),
        ("sweep-restart", "fresh-initial-opinions-per-d"),
        ("tasks", len(task_stats)),
        ("events-total", sum(s.steps for s in task_stats)),
        ("elapsed-seconds", f"{elapsed:.3f}"),
    ])
    print(f"sweep: {len(task_stats)} tasks in {elapsed:.2f}s "
          f"-> {out / 'bifurcation.csv'}")
    return 0


def cmd_gen_net(ns: argparse.Namespace) -> int:
    r = resolve(ns, _GEN_NET_KEYS)
    _validate_common(r)
    net_seed = derive_seed(r["seed"], 0, 0, STREAM_NETWORK)
    graph = generate_er(r["n"], r["degree"], Xoshiro256StarStar(net_seed))
    out = _out_dir(r)
    with open(out / "network.edges", "w") as sink:
        write_edge_list(graph, sink)
    stats = degree_stats(graph)
    print(f"gen-net: {graph.node_count} nodes, {graph.edge_count} edges, "
          f"mean degree {stats.mean:.3f}, {stats.isolated_count} isolated "
          f"-> {out / 'network.edges'}")
    return 0


def cmd_peaks(ns: argparse.Namespace) -> int:
    r = resolve(ns, _PEAKS_KEYS)
    _validate_peak_flags(r)
    path = Path(ns.csv)
    if not path.is_file():
        raise CLIError(f"no such file: {path}")
    with open(path) as source:
        _, density = read_distribution_csv(source)
    peak_set = detect_peaks(density, r["min-peak-frac"], r["min-peak-sep"])
    lines = ["location,height"]
    lines.extend(
        f"{FLOAT_FORMAT.format(p.location)},{FLOAT_FORMAT.format(p.height)}"
        for p in peak_set.peaks
    )
    table = "\n".join(lines) + "\n"
    sys.stdout.write(table)
    if ns.out is not None:
        out = _out_dir(r)
        (out / "peaks.csv").write_text(table)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return ns.func(ns)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ParamError, RangeError, DomainError, ParseError, ShapeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SweepError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
