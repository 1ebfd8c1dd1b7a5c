import statistics

import numpy as np
import pytest

from caacs import SolverConfig, carbon_for_instance
from caacs.bench.harness import (
    ExperimentPlan,
    compare_to_baseline,
    pct_error,
    pooled_totals,
    read_report,
    run_experiment,
    trial_seed,
)
from caacs.bench.plan import PlanError, generated_specs, load_plan, parse_values
from caacs.io import GeneratorSpec, generate_random

FAST = {"max_iterations": 15, "n_ants": 6}


def test_parse_values():
    assert parse_values("0:100:10", float) == tuple(float(v) for v in range(0, 101, 10))
    assert parse_values("5:50:5", int) == tuple(range(5, 51, 5))
    assert parse_values("1, 2 3", int) == (1, 2, 3)
    with pytest.raises(PlanError):
        parse_values("1:2", int)
    with pytest.raises(PlanError):
        parse_values("1:5:0", int)


def test_trial_seed_rule():
    assert trial_seed(12, 0) == 12 and trial_seed(12, 5) == 12 ^ 5


def test_pct_error():
    assert pct_error(110, 100) == pytest.approx(10.0)
    assert pct_error(90, 100) == pytest.approx(-10.0)
    assert pct_error(1, None) is None and pct_error(1, 0) is None


def test_generated_specs_broadcast_and_seeds():
    specs = generated_specs([200], [10, 20], 2, master_seed=1)
    assert [(s.n_nodes, s.clusters) for s in specs] == [(200, 10), (200, 10), (200, 20), (200, 20)]
    assert len({s.seed for s in specs}) == 4
    assert specs == generated_specs([200], [10, 20], 2, master_seed=1)
    with pytest.raises(PlanError):
        generated_specs([10, 20, 30], [2, 3], 1, 0)


def test_load_plan(tmp_path):
    (tmp_path / "plan.cfg").write_text(
        "[plan]\nexperiment = a_sweep\ntrials = 3\nseed = 7\noutput = out/r.csv\n"
        "nodes = 20:40:10\na_values = 0, 50\n[solver]\nn_ants = 12\nfixed_placement = yes\n"
        "stagnation_window = 0\nglobal_update_scope = all_edges\n"
    )
    plan = load_plan(tmp_path / "plan.cfg")
    assert plan.experiment == "a_sweep" and plan.trials == 3 and plan.master_seed == 7
    assert plan.output_path == tmp_path / "out" / "r.csv"
    assert [s.n_nodes for s in plan.instances] == [20, 30, 40]
    assert [s.clusters for s in plan.instances] == [4, 6, 8]
    assert plan.a_values == (0.0, 50.0)
    cfg = plan.base_config()
    assert cfg.n_ants == 12 and cfg.fixed_placement is True and cfg.stagnation_window == 0
    assert cfg.global_update_scope == "all_edges"


@pytest.mark.parametrize("exp, count, first", [
    ("complexity_n", 9 * 10, (40, 20)),
    ("complexity_m", 10 * 10, (200, 10)),
    ("complexity_ratio", 7 * 10, (50, 10)),
    ("a_sweep", 11 * 5, (20, 4)),
])
def test_default_grids(tmp_path, exp, count, first):
    (tmp_path / "p.cfg").write_text(f"[plan]\nexperiment = {exp}\n")
    plan = load_plan(tmp_path / "p.cfg")
    assert len(plan.instances) == count
    assert (plan.instances[0].n_nodes, plan.instances[0].clusters) == first


@pytest.mark.parametrize("text, msg", [
    ("[plan]\nexperiment = nope\n", "experiment"),
    ("[other]\nx=1\n", "missing \\[plan\\]"),
    ("[plan]\nexperiment = benchmark\n", "needs instance files"),
    ("[plan]\nexperiment = a_sweep\ncolour = red\n", "unknown plan keys"),
    ("[plan]\nexperiment = a_sweep\n[solver]\nwarp = 9\n", "unknown solver key"),
    ("[plan]\nexperiment = a_sweep\n[extra]\n", "unknown sections"),
    ("[plan]\nexperiment = a_sweep\ninstances = a.gtsp\nnodes = 5\n", "either"),
])
def test_plan_errors(tmp_path, text, msg):
    (tmp_path / "p.cfg").write_text(text)
    with pytest.raises(PlanError, match=msg):
        load_plan(tmp_path / "p.cfg")


def test_plan_validation():
    with pytest.raises(ValueError):
        ExperimentPlan("a_sweep", [GeneratorSpec(10)], trials=0)
    with pytest.raises(ValueError):
        ExperimentPlan("a_sweep", [])
    with pytest.raises(ValueError):
        ExperimentPlan("nope", [GeneratorSpec(10)])


def _a_plan(**kw):
    base = dict(experiment="a_sweep", instances=[GeneratorSpec(15, seed=1), GeneratorSpec(20, seed=2)], trials=3,
                config_overrides=FAST, a_values=(0, 10, 50), master_seed=5)
    base.update(kw)
    return ExperimentPlan(**base)


def test_a_sweep_records_and_references():
    rep = run_experiment(_a_plan(), write=False)
    assert len(rep.records) == 2 * 3 * 3
    assert {r.a_value for r in rep.records} == {0.0, 10.0, 50.0}
    assert {r.seed for r in rep.records} == {5, 4, 7}
    for r in rep.records:
        assert r.carbon_reference == "a0_mean"
        assert r.carbon_error_pct == pytest.approx(100 * (r.best_carbon - r.baseline_carbon) / r.baseline_carbon)
    a0 = [r for r in rep.records if r.a_value == 0 and r.instance_name == rep.records[0].instance_name]
    assert rep.records[0].baseline_cost == pytest.approx(statistics.fmean(r.best_cost for r in a0))


def test_csv_reproducible_and_parallel_stable():
    one = run_experiment(_a_plan(), write=False).to_csv(include_wall_time=False)
    again = run_experiment(_a_plan(), write=False).to_csv(include_wall_time=False)
    par = run_experiment(_a_plan(workers=2), write=False).to_csv(include_wall_time=False)
    assert one == again == par
    assert "wall_time_ms" not in one.splitlines()[-1]


def test_more_trials_do_not_perturb_earlier_ones():
    short = run_experiment(_a_plan(trials=2), write=False).records
    long = run_experiment(_a_plan(trials=3), write=False).records
    keep = [r for r in long if r.seed in {s.seed for s in short}]
    strip = lambda rs: [(r.instance_name, r.a_value, r.seed, r.best_cost, r.best_carbon) for r in rs]
    assert strip(keep) == strip(short)


def test_aggregates_recompute_from_trials(tmp_path):
    rep = run_experiment(_a_plan(output_path=tmp_path / "r.csv"))
    meta, rows = read_report(tmp_path / "r.csv")
    assert meta["experiment"] == "a_sweep" and meta["master_seed"] == "5"
    assert meta["solver.global_update_scope"] == "best_edges"
    trials = [r for r in rows if r["row_type"] == "trial"]
    assert len(trials) == len(rep.records)
    for agg in (r for r in rows if r["row_type"] in ("mean", "std")):
        xs = [float(t["best_carbon"]) for t in trials
              if t["instance_name"] == agg["instance_name"] and t["a_value"] == agg["a_value"]]
        want = statistics.fmean(xs) if agg["row_type"] == "mean" else statistics.stdev(xs)
        assert float(agg["best_carbon"]) == pytest.approx(want, rel=1e-12)


def test_ant_sweep_grid_arithmetic():
    plan = ExperimentPlan("ant_sweep", [GeneratorSpec(10, seed=0)], trials=10,
                          config_overrides={"max_iterations": 2}, ant_counts=tuple(range(5, 51, 5)))
    rep = run_experiment(plan, write=False)
    assert len(rep.records) == 100
    for r in rep.records:
        assert r.baseline_cost is not None and r.cost_reference == "baseline_mean"
    cell = [r for r in rep.records if r.n_ants == 5]
    mean_base = statistics.fmean(r.baseline_cost for r in cell)
    assert cell[0].cost_error_pct == pytest.approx(pct_error(cell[0].best_cost, mean_base))


def test_benchmark_against_file_optimum(fixtures):
    plan = ExperimentPlan("benchmark", [fixtures / "3eucl6.gtsp", fixtures / "2full4.gtsp"], trials=3,
                          config_overrides=FAST)
    rep = run_experiment(plan, write=False)
    with_opt = [r for r in rep.records if r.optimum is not None]
    assert with_opt and all(r.cost_error_pct >= 0 and r.cost_reference == "optimum" for r in with_opt)
    assert {r.variant for r in rep.records} == {"caacs", "acs"}


def test_complexity_records_iterations():
    plan = ExperimentPlan("complexity_n", [GeneratorSpec(20, 4, seed=0)], trials=2)
    rep = run_experiment(plan, write=False)
    assert all(1 <= r.iterations_used < 1000 for r in rep.records)


def test_compare_to_baseline_identity_and_errors(inst_with_carbon):
    inst, carbon = inst_with_carbon
    r = compare_to_baseline(inst, carbon, SolverConfig(a=1.0, **FAST))
    assert r.cost_error_pct == 0.0 and r.carbon_error_pct == 0.0
    assert r.cost_reference == "paired_baseline"
    with pytest.raises(ValueError):
        compare_to_baseline(inst, carbon, SolverConfig(variant="acs"))


def test_carbon_aware_beats_baseline_on_average():
    deltas = []
    for s in range(20):
        inst = generate_random(GeneratorSpec(60, seed=s))
        carbon = carbon_for_instance(inst, seed=s)
        deltas.append(compare_to_baseline(inst, carbon, SolverConfig(a=50.0, seed=s)).carbon_error_pct)
    assert statistics.fmean(deltas) <= 0


def test_pooled_totals():
    rep = run_experiment(_a_plan(), write=False)
    pooled = pooled_totals(rep.records)
    assert set(pooled) == {0.0, 10.0, 50.0}
    for a, arr in pooled.items():
        assert arr.shape == (3, 2)
        total = sum(r.best_carbon for r in rep.records if r.a_value == a)
        assert arr[:, 1].sum() == pytest.approx(total)


def test_tradeoff_pairs(inst_with_carbon):
    inst, _ = inst_with_carbon
    plan = ExperimentPlan("tradeoff", [inst], trials=2, config_overrides=FAST)
    rep = run_experiment(plan, write=False)
    assert len(rep.records) == 2
    assert all(r.baseline_carbon is not None and r.carbon_reference == "paired_baseline" for r in rep.records)
    assert np.isfinite([r.carbon_error_pct for r in rep.records]).all()


def test_shipped_plans_load():
    from pathlib import Path
    plans = sorted((Path(__file__).parent.parent / "plans").glob("*.cfg"))
    assert len(plans) >= 4
    for p in plans:
        plan = load_plan(p)
        assert plan.instances and plan.output_path is not None
