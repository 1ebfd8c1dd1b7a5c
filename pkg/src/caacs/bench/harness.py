"""Experiment grids, paired baseline comparison and CSV reports."""

from __future__ import annotations

import csv
import io
import statistics
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from ..carbon import NEUTRAL, CarbonMatrix, carbon_for_instance, load_vehicle_config
from ..core import GtspInstance
from ..engine import SolverConfig, run
from ..io.generate import GeneratorSpec, generate_random
from ..io.gtsplib import read_gtsplib

EXPERIMENTS = ("a_sweep", "ant_sweep", "benchmark", "complexity_n", "complexity_m",
               "complexity_ratio", "tradeoff")


@dataclass(frozen=True)
class TrialRecord:
    instance_name: str
    variant: str
    seed: Optional[int]
    n_ants: int
    a_value: float
    best_cost: float
    best_carbon: float
    baseline_cost: Optional[float] = None
    baseline_carbon: Optional[float] = None
    cost_error_pct: Optional[float] = None
    carbon_error_pct: Optional[float] = None
    cost_reference: str = ""
    carbon_reference: str = ""
    optimum: Optional[float] = None
    iterations_used: int = 0
    wall_time_ms: float = 0.0


RECORD_FIELDS = [f.name for f in fields(TrialRecord)]
NUMERIC_FIELDS = ("best_cost", "best_carbon", "baseline_cost", "baseline_carbon", "cost_error_pct",
                  "carbon_error_pct", "iterations_used", "wall_time_ms")


def pct_error(value: float, reference: Optional[float]) -> Optional[float]:
    if reference is None or reference == 0:
        return None
    return 100.0 * (value - reference) / reference


@dataclass
class ExperimentPlan:
    experiment: str
    instances: list = field(default_factory=list)
    trials: int = 1
    config_overrides: dict = field(default_factory=dict)
    output_path: Optional[Path] = None
    master_seed: int = 0
    a_values: tuple = tuple(range(0, 101, 10))
    ant_counts: tuple = tuple(range(5, 51, 5))
    workers: int = 1
    vehicle: Optional[Path] = None
    vehicle_kind: Optional[str] = None
    distance_unit_scale: float = 1.0

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.instances:
            raise ValueError("plan has no instances")

    def base_config(self) -> SolverConfig:
        return SolverConfig(**self.config_overrides)


@dataclass
class ExperimentReport:
    plan: ExperimentPlan
    records: list
    metadata: dict

    def aggregates(self):
        """(row_type, record) pairs with mean and sample-std rows per grid cell."""
        groups: dict = {}
        for r in self.records:
            key = (r.instance_name, r.variant, r.n_ants, r.a_value)
            groups.setdefault(key, []).append(r)
        out = []
        for (name, variant, ants, a), rows in groups.items():
            base = dict(instance_name=name, variant=variant, seed=None, n_ants=ants, a_value=a,
                        cost_reference=rows[0].cost_reference, carbon_reference=rows[0].carbon_reference,
                        optimum=rows[0].optimum)
            for kind, fn in (("mean", statistics.fmean), ("std", _std)):
                vals = {}
                for f in NUMERIC_FIELDS:
                    xs = [getattr(r, f) for r in rows if getattr(r, f) is not None]
                    vals[f] = fn(xs) if xs else None
                out.append((kind, TrialRecord(**base, **vals)))
        return out

    def to_csv(self, include_wall_time: bool = True) -> str:
        buf = io.StringIO()
        for k, v in self.metadata.items():
            buf.write(f"# {k}={v}\n")
        cols = ["row_type"] + [c for c in RECORD_FIELDS if include_wall_time or c != "wall_time_ms"]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        rows = [("trial", r) for r in self.records] + self.aggregates()
        for kind, r in rows:
            d = asdict(r)
            w.writerow([kind] + [_cell(d[c]) for c in cols[1:]])
        return buf.getvalue()

    def write(self, path=None) -> Path:
        path = Path(path or self.plan.output_path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_csv(), encoding="utf-8")
        return path


def _std(xs):
    return statistics.stdev(xs) if len(xs) > 1 else 0.0


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def read_report(path):
    """Parse a report CSV back into (metadata, rows as dicts)."""
    meta = {}
    body = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("# "):
            k, _, v = line[2:].partition("=")
            meta[k] = v
        else:
            body.append(line)
    return meta, list(csv.DictReader(body))


# --- single runs --------------------------------------------------------------

def trial_seed(master_seed: int, trial_index: int) -> int:
    return int(master_seed) ^ int(trial_index)


def _solve(instance, carbon, config):
    t0 = time.perf_counter()
    res = run(instance, carbon, config)
    return res, (time.perf_counter() - t0) * 1000.0


def _record(instance, config, res, ms, **extra) -> TrialRecord:
    a = config.a if config.variant == "caacs" else NEUTRAL
    return TrialRecord(
        instance_name=instance.name, variant=config.variant, seed=config.seed, n_ants=config.n_ants,
        a_value=a, best_cost=res.best_tour.cost_total, best_carbon=res.best_tour.carbon_total,
        optimum=instance.optimum, iterations_used=res.iterations_used, wall_time_ms=ms, **extra,
    )


def solve_record(instance, carbon, config) -> TrialRecord:
    res, ms = _solve(instance, carbon, config)
    return _record(instance, config, res, ms)


def compare_to_baseline(instance: GtspInstance, carbon: CarbonMatrix, config: SolverConfig) -> TrialRecord:
    """Run caacs and the carbon-blind acs baseline on the same seed.

    Negative error percentages mean caacs found a cheaper or cleaner tour.
    """
    if config.variant != "caacs":
        raise ValueError("compare_to_baseline needs a caacs config")
    res, ms = _solve(instance, carbon, config)
    base, _ = _solve(instance, carbon, config.replace(variant="acs"))
    bc, bco = base.best_tour.cost_total, base.best_tour.carbon_total
    return _record(
        instance, config, res, ms,
        baseline_cost=bc, baseline_carbon=bco,
        cost_error_pct=pct_error(res.best_tour.cost_total, bc),
        carbon_error_pct=pct_error(res.best_tour.carbon_total, bco),
        cost_reference="paired_baseline", carbon_reference="paired_baseline",
    )


# --- plan execution -----------------------------------------------------------

def instance_seed(master_seed: int, name: str) -> int:
    return (zlib.crc32(name.encode()) ^ int(master_seed)) & 0xFFFFFFFF


def load_instances(plan: ExperimentPlan):
    """Materialise the plan's instances with their carbon matrices."""
    consts, profile = load_vehicle_config(plan.vehicle, plan.vehicle_kind)
    out = []
    for src in plan.instances:
        if isinstance(src, GtspInstance):
            inst = src
        elif isinstance(src, GeneratorSpec):
            inst = generate_random(src)
        else:
            inst = read_gtsplib(src)
        carbon = carbon_for_instance(inst, consts, profile, instance_seed(plan.master_seed, inst.name),
                                     plan.distance_unit_scale)
        out.append((inst, carbon))
    return out


def _job(args):
    kind, instance, carbon, config = args
    if kind == "pair":
        return compare_to_baseline(instance, carbon, config)
    return solve_record(instance, carbon, config)


def _cells(plan: ExperimentPlan, base: SolverConfig):
    """Yield (cell_key, config_without_seed, job_kind) in declared grid order."""
    exp = plan.experiment
    if exp == "a_sweep":
        for a in plan.a_values:
            yield ("caacs", a), base.replace(variant="caacs", a=float(a)), "solve"
    elif exp == "ant_sweep":
        for k in plan.ant_counts:
            yield ("pair", k), base.replace(variant="caacs", n_ants=int(k)), "pair"
    elif exp == "benchmark":
        yield ("caacs",), base.replace(variant="caacs"), "solve"
        yield ("acs",), base.replace(variant="acs"), "solve"
    elif exp == "tradeoff":
        yield ("pair",), base.replace(variant="caacs"), "pair"
    else:
        yield ("run",), base, "solve"


def run_experiment(plan: ExperimentPlan, write: bool = True) -> ExperimentReport:
    base = plan.base_config()
    loaded = load_instances(plan)
    jobs = []
    for inst, carbon in loaded:
        for _, cfg, kind in _cells(plan, base):
            for t in range(plan.trials):
                jobs.append((kind, inst, carbon, cfg.replace(seed=trial_seed(plan.master_seed, t))))
    if plan.workers > 1:
        with ProcessPoolExecutor(max_workers=plan.workers) as pool:
            records = list(pool.map(_job, jobs))
    else:
        records = [_job(j) for j in jobs]
    records = _attach_references(plan, records)
    meta = report_metadata(plan, base)
    report = ExperimentReport(plan, records, meta)
    if write and plan.output_path is not None:
        report.write()
    return report


def _mean_by(records, key):
    acc: dict = {}
    for r in records:
        acc.setdefault(key(r), []).append(r)
    return {k: (statistics.fmean(r.best_cost for r in v), statistics.fmean(r.best_carbon for r in v))
            for k, v in acc.items()}


def _attach_references(plan, records):
    exp = plan.experiment
    if exp == "a_sweep":
        ref = _mean_by([r for r in records if r.a_value == NEUTRAL], lambda r: r.instance_name)
        label = "a0_mean"
        keyf = lambda r: r.instance_name
    elif exp == "ant_sweep":
        # paired records: average the per-trial baselines of each cell
        acc: dict = {}
        for r in records:
            acc.setdefault((r.instance_name, r.n_ants), []).append(r)
        ref = {k: (statistics.fmean(r.baseline_cost for r in v), statistics.fmean(r.baseline_carbon for r in v))
               for k, v in acc.items()}
        label = "baseline_mean"
        keyf = lambda r: (r.instance_name, r.n_ants)
    elif exp == "benchmark":
        ref = _mean_by([r for r in records if r.variant == "acs"], lambda r: (r.instance_name, r.n_ants))
        label = "baseline_mean"
        keyf = lambda r: (r.instance_name, r.n_ants)
    else:
        return records
    out = []
    for r in records:
        bc, bco = ref.get(keyf(r), (None, None))
        cost_ref, cost_label = bc, label
        if exp == "ant_sweep":
            bc, bco = r.baseline_cost, r.baseline_carbon
            cost_ref, bref = ref[keyf(r)]
        else:
            bref = bco
        if exp == "benchmark" and r.optimum is not None:
            cost_ref, cost_label = r.optimum, "optimum"
        out.append(TrialRecord(**{
            **asdict(r),
            "baseline_cost": bc, "baseline_carbon": bco,
            "cost_error_pct": pct_error(r.best_cost, cost_ref),
            "carbon_error_pct": pct_error(r.best_carbon, bref),
            "cost_reference": cost_label if cost_ref is not None else "",
            "carbon_reference": label if bref is not None else "",
        }))
    return out


def report_metadata(plan: ExperimentPlan, base: SolverConfig) -> dict:
    meta = {
        "experiment": plan.experiment,
        "master_seed": plan.master_seed,
        "trials": plan.trials,
        "trial_seed_rule": "master_seed XOR trial_index",
        "distance_unit_scale": plan.distance_unit_scale,
        "vehicle_config": str(plan.vehicle) if plan.vehicle else "builtin",
        "vehicle_kind": plan.vehicle_kind or "default",
    }
    for f in fields(SolverConfig):
        if f.name != "seed":
            meta[f"solver.{f.name}"] = getattr(base, f.name)
    meta["solver.stagnation_window"] = base.stagnation_window if base.stagnation_window is not None else "ceil(N/5)"
    meta["global_update_readings"] = "best_edges: tour edges only; all_edges: every edge decays by 1-rho_g"
    return meta


# --- derived statistics -------------------------------------------------------

def pooled_totals(records: Sequence[TrialRecord], by: str = "a_value"):
    """Per-trial totals summed over instances, grouped by ``by``.

    Returns ``{value: array of shape (trials, 2)}`` with columns (cost, carbon);
    trial identity is the seed.
    """
    acc: dict = {}
    for r in records:
        g = acc.setdefault(getattr(r, by), {})
        c, co = g.get(r.seed, (0.0, 0.0))
        g[r.seed] = (c + r.best_cost, co + r.best_carbon)
    return {k: np.array([v[s] for s in sorted(v)]) for k, v in acc.items()}

