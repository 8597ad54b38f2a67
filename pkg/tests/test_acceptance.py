"""Acceptance suite: desk-scale checks of the engine's structural claims.

Each test prints one `[acceptance] ... PASS` line (run with `-s` to see
them live).  Heavy steady-state runs are shared through session fixtures:
N=2000 networks with mean degree 10, 10^7 events per run, five replicate
networks per configuration, histogram window 1000 events.
"""

import io
import time
from dataclasses import replace

import numpy as np
import pytest

from deffuant import (
    MutationProfile,
    ProfileKind,
    Scheme,
    SimConfig,
    SweepPlan,
    detect_peaks,
    execute,
    generate_er,
    mean_rate,
    pair_update,
    run,
    symmetry_l1,
)
from deffuant.profiles import evaluate
from deffuant.rng import Xoshiro256StarStar
from deffuant.sweep import NetParams, write_bifurcation_csv

NODES = 2000
AVG_DEGREE = 10.0
EVENTS = 10_000_000
WINDOW = 1000
REPLICATES = 5
MASTER_SEED = 20240901

UNIFORM = MutationProfile(ProfileKind.UNIFORM, 0.01, 0.0)
ASYM_UP = MutationProfile(ProfileKind.ASYMMETRIC_LINEAR, 0.01, 0.02)
SYM_EDGE_HEAVY = MutationProfile(ProfileKind.SYMMETRIC_TENT, 0.01, -0.02)


def report(name: str, ok: bool, detail: str = "") -> None:
    print(f"[acceptance] {name}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
    assert ok, f"{name}: {detail}"


def averaged_density(profile: MutationProfile, d: float) -> np.ndarray:
    """Replicate-averaged steady-state density at one tolerance."""
    base = SimConfig(tolerance=d, mu=0.5, total_steps=EVENTS, window=WINDOW,
                     scheme=Scheme.MUTATE_OR_INTERACT, seed=0)
    plan = SweepPlan(
        d_start=d, d_end=d, d_step=1.0, replicates=REPLICATES,
        base_config=base, net_params=NetParams(NODES, AVG_DEGREE),
        profile=profile, master_seed=MASTER_SEED, bins=200,
    )
    bif, _ = execute(plan, parallelism=4)
    return bif.densities[0]


@pytest.fixture(scope="session")
def uniform_densities():
    started = time.perf_counter()
    densities = {d: averaged_density(UNIFORM, d) for d in (0.1, 0.15, 0.25, 0.4)}
    return densities, time.perf_counter() - started


@pytest.fixture(scope="session")
def shifted_densities():
    return {
        "asym_up": averaged_density(ASYM_UP, 0.1),
        "sym_edge_heavy": averaged_density(SYM_EDGE_HEAVY, 0.1),
    }


def test_c01_pair_update_conservation_and_contraction():
    rng = np.random.default_rng(515151)
    n = 1_000_000
    oa = rng.random(n).tolist()
    ob = rng.random(n).tolist()
    ds = rng.random(n).tolist()
    mus = np.where(rng.random(n) < 0.5, 0.5,
                   rng.random(n) * 0.499 + 0.001).tolist()
    out_a = [0.0] * n
    out_b = [0.0] * n
    update = pair_update
    started = time.perf_counter()
    for i in range(n):
        out_a[i], out_b[i] = update(oa[i], ob[i], ds[i], mus[i])
    elapsed = time.perf_counter() - started

    a1, b1 = np.array(oa), np.array(ob)
    a2, b2 = np.array(out_a), np.array(out_b)
    mu_arr, d_arr = np.array(mus), np.array(ds)
    drift = np.abs((a2 + b2) - (a1 + b1)).max()
    gap1, gap2 = np.abs(a1 - b1), np.abs(a2 - b2)
    within = gap1 < d_arr
    expected_gap = np.where(within, np.abs(1.0 - 2.0 * mu_arr) * gap1, gap1)
    gap_err = np.abs(gap2 - expected_gap).max()
    half_within = within & (mu_arr == 0.5)

    ok = (drift < 1e-12 and gap_err < 1e-12
          and bool((gap2 <= gap1).all())
          and bool((gap2[half_within] == 0.0).all())
          and elapsed < 1.0)
    report("C1 pair-update conservation & contraction", ok,
           f"(drift {drift:.1e}, gap err {gap_err:.1e}, {elapsed:.2f}s)")


def test_c02_mean_mutation_rate_preserved():
    configs = [(ProfileKind.ASYMMETRIC_LINEAR, a) for a in (-0.02, -0.01, 0.01, 0.02)]
    configs += [(ProfileKind.SYMMETRIC_TENT, a) for a in (-0.04, -0.02, 0.02, 0.04)]
    grid = (np.arange(1_000_000) + 0.5) / 1_000_000
    started = time.perf_counter()
    worst_analytic = 0.0
    worst_quadrature = 0.0
    for kind, slope in configs:
        profile = MutationProfile(kind, 0.01, slope)
        analytic = mean_rate(profile)
        quadrature = float(evaluate(profile, grid).mean())
        worst_analytic = max(worst_analytic, abs(analytic - 0.01))
        worst_quadrature = max(worst_quadrature, abs(quadrature - analytic))
    elapsed = time.perf_counter() - started
    ok = worst_analytic < 1e-15 and worst_quadrature < 1e-9 and elapsed < 1.0
    report("C2 mean mutation rate preserved", ok,
           f"(analytic {worst_analytic:.1e}, quadrature {worst_quadrature:.1e}, "
           f"{elapsed:.2f}s)")


def giant_component_mask(g) -> np.ndarray:
    labels = np.full(g.node_count, -1, dtype=np.int64)
    sizes = {}
    for start in range(g.node_count):
        if labels[start] >= 0:
            continue
        stack = [start]
        labels[start] = start
        size = 0
        while stack:
            u = stack.pop()
            size += 1
            for v in g.neighbors_of(u):
                if labels[v] < 0:
                    labels[v] = start
                    stack.append(int(v))
        sizes[start] = size
    giant = max(sizes, key=sizes.get)
    return labels == giant


def test_c03_full_consensus_without_mutation():
    started = time.perf_counter()
    g = generate_er(NODES, AVG_DEGREE, Xoshiro256StarStar(77))
    zero_noise = MutationProfile(ProfileKind.UNIFORM, 0.0, 0.0)
    cfg = SimConfig(tolerance=1.0, mu=0.5, total_steps=EVENTS, window=1, seed=78)
    state, _, _ = run(g, cfg, zero_noise, bins=200)
    mask = giant_component_mask(g)
    gap = float(state.opinions[mask].max() - state.opinions[mask].min())
    elapsed = time.perf_counter() - started
    ok = gap < 1e-6 and elapsed < 10.0
    report("C3 full consensus without mutation", ok,
           f"(giant-component gap {gap:.2e}, {mask.sum()}/{NODES} nodes, "
           f"{elapsed:.1f}s)")


def test_c04_peak_count_follows_half_inverse_tolerance(uniform_densities):
    densities, elapsed = uniform_densities
    results = {}
    ok = elapsed < 300.0
    for d, density in densities.items():
        expected = round(1.0 / (2.0 * d))
        found = detect_peaks(density).count
        results[d] = (found, expected)
        ok = ok and abs(found - expected) <= 1
    report("C4 peak count ~ 1/(2d)", ok,
           f"(found vs expected {results}, {elapsed:.0f}s)")


def test_c05_uniform_noise_gives_even_peak_heights(uniform_densities):
    densities, _ = uniform_densities
    peaks = detect_peaks(densities[0.1]).peaks
    interior = peaks[1:-1] if len(peaks) >= 3 else peaks
    heights = [p.height for p in interior]
    ratio = max(heights) / min(heights)
    ok = len(peaks) >= 3 and ratio < 1.5
    report("C5 uniform-noise peak heights even", ok,
           f"({len(peaks)} peaks, interior height ratio {ratio:.3f})")


def test_c06_symmetric_profile_keeps_density_symmetric(shifted_densities):
    # Known red at these settings: finite-size cluster positions wander a
    # few bins per run, so even a mirror-symmetric dynamics scores ~0.26+
    # on five replicate-averaged raw densities (the symmetric profile sits
    # near 0.5, the asymmetric near 1.7).  The 0.15 bound is kept as the
    # target rather than loosened to the observed noise floor.
    sym_score = symmetry_l1(shifted_densities["sym_edge_heavy"])
    asym_score = symmetry_l1(shifted_densities["asym_up"])
    ok = sym_score < 0.15 < asym_score
    report("C6 symmetric profile -> symmetric density", ok,
           f"(symmetric {sym_score:.3f} < 0.15 < asymmetric {asym_score:.3f})")


def test_c07_rising_mutation_rate_shifts_mass_down(shifted_densities):
    density = shifted_densities["asym_up"]
    below = float(density[:100].sum())
    above = float(density[100:].sum())
    ok = above < below
    report("C7 mass shifts away from high-mutation opinions", ok,
           f"(mass below 0.5: {below / 200:.3f}, above: {above / 200:.3f})")


def test_c08_sweep_output_independent_of_worker_count():
    base = SimConfig(tolerance=0.1, mu=0.5, total_steps=1_000_000, window=WINDOW,
                     seed=0)
    plan = SweepPlan(
        d_start=0.1, d_end=0.5, d_step=0.05, replicates=2, base_config=base,
        net_params=NetParams(1000, AVG_DEGREE), profile=UNIFORM,
        master_seed=31337, bins=200,
    )
    started = time.perf_counter()
    outputs = []
    for workers in (1, 4, 8):
        bif, _ = execute(plan, parallelism=workers)
        buf = io.StringIO()
        write_bifurcation_csv(bif, buf)
        outputs.append(buf.getvalue())
    elapsed = time.perf_counter() - started
    ok = outputs[0] == outputs[1] == outputs[2] and elapsed < 120.0
    report("C8 sweep byte-identical for workers 1/4/8", ok,
           f"({len(outputs[0])} bytes each, {elapsed:.1f}s)")


def test_c09_er_edge_counts_match_binomial_statistics():
    n, avg_degree, graphs = 10_000, 10.0, 100
    p = avg_degree / (n - 1)
    pairs = n * (n - 1) / 2
    expected = pairs * p  # 50000
    sigma_mean = np.sqrt(pairs * p * (1 - p) / graphs)
    counts = [
        generate_er(n, avg_degree, Xoshiro256StarStar(seed)).edge_count
        for seed in range(graphs)
    ]
    deviation = abs(float(np.mean(counts)) - expected)
    ok = deviation < 3 * sigma_mean
    report("C9 ER edge counts match binomial model", ok,
           f"(mean {np.mean(counts):.1f} vs {expected:.0f}, "
           f"|dev| {deviation:.1f} < {3 * sigma_mean:.1f})")


def test_c10_paper_scale_throughput():
    g = generate_er(10_000, AVG_DEGREE, Xoshiro256StarStar(99))
    cfg = SimConfig(tolerance=0.25, mu=0.5, total_steps=50_000_000,
                    window=WINDOW, seed=100)
    started = time.perf_counter()
    _, _, stats = run(g, cfg, UNIFORM, bins=200)
    elapsed = time.perf_counter() - started
    ok = elapsed < 60.0
    report("C10 paper-scale run under 60s", ok,
           f"({stats.steps} events in {elapsed:.1f}s, "
           f"{stats.steps / elapsed / 1e6:.1f}M events/s)")
