import io
from dataclasses import replace

import numpy as np
import pytest

from deffuant import (
    MutationProfile,
    ParamError,
    ProfileKind,
    SimConfig,
    SweepPlan,
    derive_seed,
    detect_peaks,
    execute,
    merge,
    plan_tasks,
    run,
)
from deffuant.network import generate_er
from deffuant.rng import Xoshiro256StarStar
from deffuant.sweep import (
    STREAM_DYNAMICS,
    STREAM_NETWORK,
    NetParams,
    read_bifurcation_csv,
    replicate_network_seed,
    write_bifurcation_csv,
)

UNIFORM = MutationProfile(ProfileKind.UNIFORM, 0.01, 0.0)


def small_plan(**overrides):
    base = SimConfig(tolerance=0.1, total_steps=100_000, window=200, seed=0)
    defaults = dict(
        d_start=0.1, d_end=0.3, d_step=0.1, replicates=2, base_config=base,
        net_params=NetParams(300, 8.0), profile=UNIFORM, master_seed=7, bins=100,
    )
    defaults.update(overrides)
    return SweepPlan(**defaults)


class TestPlanTasks:
    def test_paper_scale_grid_has_131_values_and_1310_tasks(self):
        plan = small_plan(d_start=0.1, d_end=0.75, d_step=0.005, replicates=10)
        d_values = plan.d_values()
        assert len(d_values) == 131
        assert d_values[0] == pytest.approx(0.1)
        assert d_values[-1] == pytest.approx(0.75)
        assert len(plan_tasks(plan)) == 1310

    def test_decimal_grid_includes_endpoint(self):
        plan = small_plan(d_start=0.1, d_end=0.3, d_step=0.1)
        assert plan.d_values() == pytest.approx([0.1, 0.2, 0.3])

    def test_degenerate_grid_is_single_value(self):
        plan = small_plan(d_start=0.3, d_end=0.3)
        assert len(plan.d_values()) == 1

    def test_single_task(self):
        plan = small_plan(d_start=0.3, d_end=0.3, replicates=1)
        tasks = plan_tasks(plan)
        assert len(tasks) == 1
        assert tasks[0].replicate_index == 0 and tasks[0].d_index == 0

    def test_replicates_share_network_seed_across_d(self):
        plan = small_plan()
        assert replicate_network_seed(plan, 0) == derive_seed(7, 0, 0, STREAM_NETWORK)
        tasks = plan_tasks(plan)
        rep0 = [t for t in tasks if t.replicate_index == 0]
        assert len({t.seed for t in rep0}) == len(rep0)  # distinct dynamics seeds

    def test_invalid_plans_rejected(self):
        with pytest.raises(ParamError):
            small_plan(d_step=0.0)
        with pytest.raises(ParamError):
            small_plan(d_start=0.5, d_end=0.3)
        with pytest.raises(ParamError):
            small_plan(replicates=0)


class TestDeriveSeed:
    def test_deterministic(self):
        assert derive_seed(1, 2, 3, 4) == derive_seed(1, 2, 3, 4)

    def test_stream_tag_separates_streams(self):
        assert (derive_seed(1, 0, 0, STREAM_NETWORK)
                != derive_seed(1, 0, 0, STREAM_DYNAMICS))

    def test_each_coordinate_matters(self):
        base = derive_seed(10, 1, 2, 3)
        assert derive_seed(11, 1, 2, 3) != base
        assert derive_seed(10, 2, 2, 3) != base
        assert derive_seed(10, 1, 3, 3) != base

    def test_million_distinct_tuples_no_collisions(self):
        seeds = set()
        for rep in range(100):
            for d_index in range(5000):
                seeds.add(derive_seed(42, rep, d_index, STREAM_DYNAMICS))
                seeds.add(derive_seed(42, rep, d_index, STREAM_NETWORK))
        assert len(seeds) == 1_000_000


class TestExecute:
    def test_serial_and_parallel_outputs_are_byte_identical(self):
        plan = small_plan()
        serial, _ = execute(plan, parallelism=1)
        parallel, _ = execute(plan, parallelism=4)
        bufs = []
        for result in (serial, parallel):
            buf = io.StringIO()
            write_bifurcation_csv(result, buf)
            bufs.append(buf.getvalue())
        assert bufs[0] == bufs[1]

    def test_single_task_map_equals_direct_run(self):
        plan = small_plan(d_start=0.2, d_end=0.2, replicates=1)
        bif, stats = execute(plan)
        assert len(stats) == 1
        graph = generate_er(300, 8.0,
                            Xoshiro256StarStar(replicate_network_seed(plan, 0)))
        cfg = replace(plan.base_config, tolerance=0.2,
                      seed=derive_seed(7, 0, 0, STREAM_DYNAMICS))
        _, hist, _ = run(graph, cfg, UNIFORM, bins=plan.bins)
        assert np.array_equal(bif.densities[0], hist.density())

    def test_rows_equal_manual_replicate_merge(self):
        plan = small_plan(d_start=0.2, d_end=0.2, replicates=3)
        bif, _ = execute(plan)
        merged = None
        for rep in range(3):
            graph = generate_er(300, 8.0,
                                Xoshiro256StarStar(replicate_network_seed(plan, rep)))
            cfg = replace(plan.base_config, tolerance=0.2,
                          seed=derive_seed(7, rep, 0, STREAM_DYNAMICS))
            _, hist, _ = run(graph, cfg, UNIFORM, bins=plan.bins)
            merged = hist if merged is None else merge(merged, hist)
        assert np.array_equal(bif.densities[0], merged.density())

    def test_task_results_independent_of_execution_order(self):
        plan = small_plan()
        tasks = plan_tasks(plan)
        graphs = {
            rep: generate_er(300, 8.0,
                             Xoshiro256StarStar(replicate_network_seed(plan, rep)))
            for rep in range(plan.replicates)
        }

        def run_task(task):
            cfg = replace(plan.base_config, tolerance=task.d_value, seed=task.seed)
            _, hist, _ = run(graphs[task.replicate_index], cfg, UNIFORM,
                             bins=plan.bins)
            return hist.counts

        forward = [run_task(t) for t in tasks]
        backward = [run_task(t) for t in reversed(tasks)]
        for fwd, bwd in zip(forward, reversed(backward)):
            assert np.array_equal(fwd, bwd)

    def test_progress_reports_all_tasks(self):
        plan = small_plan()
        seen = []
        execute(plan, parallelism=2, progress=lambda done, total: seen.append((done, total)))
        assert seen[-1] == (len(plan_tasks(plan)),) * 2

    def test_invalid_parallelism_rejected(self):
        with pytest.raises(ParamError):
            execute(small_plan(), parallelism=0)


def test_peak_count_steps_down_across_tolerance_grid():
    # Desk-scale check of the ~1/(2d) cluster-count law: more tolerance,
    # fewer opinion clusters, down to a single central one.
    base = SimConfig(tolerance=0.1, total_steps=10_000_000, window=1000, seed=0)
    plan = SweepPlan(
        d_start=0.1, d_end=0.5, d_step=0.05, replicates=2, base_config=base,
        net_params=NetParams(2000, 10.0), profile=UNIFORM, master_seed=2024,
        bins=200,
    )
    bif, _ = execute(plan, parallelism=4)
    counts = [detect_peaks(bif.densities[j]).count for j in range(len(bif.d_values))]
    assert all(a >= b for a, b in zip(counts, counts[1:]))
    assert counts[0] >= 4
    assert counts[-1] == 1


class TestBifurcationCSV:
    def test_round_trip(self):
        plan = small_plan()
        bif, _ = execute(plan)
        buf = io.StringIO()
        write_bifurcation_csv(bif, buf)
        text = buf.getvalue()
        assert text.startswith("bin_center,d=0.100,d=0.200,d=0.300\n")
        buf.seek(0)
        readback = read_bifurcation_csv(buf)
        assert readback.d_values == pytest.approx(bif.d_values, abs=1e-3)
        assert readback.densities == pytest.approx(bif.densities, rel=1e-8, abs=1e-9)
