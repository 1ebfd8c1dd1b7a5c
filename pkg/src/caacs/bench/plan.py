"""Plain-text plan files for :func:`run_experiment`.

A plan is an INI file with a ``[plan]`` section and an optional ``[solver]``
section::

    [plan]
    experiment = a_sweep          ; a_sweep, ant_sweep, benchmark, complexity_n,
                                  ; complexity_m, complexity_ratio, tradeoff
    trials = 5
    seed = 0                      ; master seed
    output = results/a_sweep.csv  ; relative to the plan file
    workers = 4
    a_values = 0:100:10           ; inclusive start:stop:step, or a comma list
    ant_counts = 5:50:5

    ; either instance files (relative to the plan file) ...
    instances = 20kroA100.gtsp, 40kroA200.gtsp
    ; ... or generated ones
    nodes = 20:100:10
    clusters = 4                  ; one value, one per size, or omit for ceil(N/5)
    instances_per_size = 1        ; default 1 with nodes, else the grid's own count
    weight_min = 10
    weight_max = 5000

    vehicle = my_vehicles.cfg     ; omit for the bundled profiles
    vehicle_kind = LDV
    distance_unit_scale = 1

    [solver]
    n_ants = 30
    max_iterations = 1000
    global_update_scope = best_edges

``[solver]`` keys are :class:`~caacs.engine.SolverConfig` fields. When neither
``instances`` nor ``nodes`` is given the experiment's default grid is used.
"""

from __future__ import annotations

import configparser
from dataclasses import fields
from pathlib import Path

import numpy as np

from ..engine import SolverConfig
from ..io.generate import GeneratorSpec
from .harness import EXPERIMENTS, ExperimentPlan

PLAN_KEYS = {
    "experiment", "trials", "seed", "output", "workers", "a_values", "ant_counts", "instances", "nodes",
    "clusters", "instances_per_size", "weight_min", "weight_max", "vehicle", "vehicle_kind",
    "distance_unit_scale",
}

# (nodes, clusters, instances per size); clusters None means ceil(N/5)
DEFAULT_GRIDS = {
    "a_sweep": ("20:300:28", None, 5),
    "ant_sweep": ("100,150,200", None, 2),
    "tradeoff": ("60", None, 20),
    "complexity_n": ("40:200:20", "20", 10),
    "complexity_m": ("200", "10:100:10", 10),
    "complexity_ratio": ("50:350:50", None, 10),
}


class PlanError(ValueError):
    pass


def parse_values(text: str, kind=float) -> tuple:
    """``"a:b:s"`` (inclusive) or ``"x, y, z"``."""
    text = text.strip()
    if not text:
        return ()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise PlanError(f"range must be start:stop:step, got {text!r}")
        start, stop, step = (kind(p) for p in parts)
        if step <= 0:
            raise PlanError(f"range step must be positive, got {text!r}")
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return tuple(kind(start + i * step) for i in range(max(count, 0)))
    return tuple(kind(t) for t in text.replace(",", " ").split())


def _solver_overrides(section) -> dict:
    defaults = {f.name: f.default for f in fields(SolverConfig)}
    out = {}
    for key, raw in section.items():
        if key not in defaults:
            raise PlanError(f"unknown solver key {key!r}")
        d = defaults[key]
        if key == "stagnation_window":
            out[key] = None if raw.strip().lower() in ("", "none", "auto") else int(raw)
        elif isinstance(d, bool):
            out[key] = section.getboolean(key)
        elif isinstance(d, int):
            out[key] = int(raw)
        elif isinstance(d, float):
            out[key] = float(raw)
        else:
            out[key] = raw.strip()
    SolverConfig(**out)
    return out


def generated_specs(nodes, clusters, per_size, master_seed, weight_min=10.0, weight_max=5000.0):
    """GeneratorSpecs for a (nodes, clusters) grid.

    One of ``nodes``/``clusters`` may have a single entry and is broadcast over
    the other. Each instance seed derives from (master, N, M, copy index).
    """
    nodes = tuple(nodes)
    clusters = tuple(clusters) if clusters else (None,) * len(nodes)
    if len(nodes) == 1 and len(clusters) > 1:
        nodes = nodes * len(clusters)
    if len(clusters) == 1 and len(nodes) > 1:
        clusters = clusters * len(nodes)
    if len(nodes) != len(clusters):
        raise PlanError(f"{len(nodes)} node counts but {len(clusters)} cluster counts")
    specs = []
    for n, m in zip(nodes, clusters):
        spec_m = m if m is not None else GeneratorSpec(n).clusters
        for k in range(per_size):
            seed = int(np.random.SeedSequence([master_seed, n, spec_m, k]).generate_state(1)[0])
            specs.append(GeneratorSpec(n, m, weight_min, weight_max, seed))
    return specs


def load_plan(path) -> ExperimentPlan:
    path = Path(path)
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except configparser.Error as exc:
        raise PlanError(f"{path}: {exc}") from exc
    if "plan" not in cp:
        raise PlanError(f"{path}: missing [plan] section")
    extra = set(cp.sections()) - {"plan", "solver"}
    if extra:
        raise PlanError(f"{path}: unknown sections {sorted(extra)}")
    p = cp["plan"]
    unknown = set(p) - PLAN_KEYS
    if unknown:
        raise PlanError(f"{path}: unknown plan keys {sorted(unknown)}")
    exp = p.get("experiment", "").strip()
    if exp not in EXPERIMENTS:
        raise PlanError(f"{path}: experiment must be one of {EXPERIMENTS}, got {exp!r}")
    base = path.parent
    master = p.getint("seed", 0)

    files = [t.strip() for t in p.get("instances", "").split(",") if t.strip()]
    if files and "nodes" in p:
        raise PlanError(f"{path}: give either instances or nodes, not both")
    if files:
        instances = [base / f for f in files]
    else:
        if "nodes" in p:
            nodes_txt, clusters_txt, per_size = p["nodes"], p.get("clusters"), 1
        elif exp in DEFAULT_GRIDS:
            nodes_txt, clusters_txt, per_size = DEFAULT_GRIDS[exp]
            clusters_txt = p.get("clusters", clusters_txt)
        else:
            raise PlanError(f"{path}: {exp} needs instance files")
        instances = generated_specs(
            parse_values(nodes_txt, int),
            parse_values(clusters_txt, int) if clusters_txt else None,
            p.getint("instances_per_size", per_size), master,
            p.getfloat("weight_min", 10.0), p.getfloat("weight_max", 5000.0),
        )

    kwargs = {}
    if "a_values" in p:
        kwargs["a_values"] = parse_values(p["a_values"], float)
    if "ant_counts" in p:
        kwargs["ant_counts"] = parse_values(p["ant_counts"], int)
    vehicle = p.get("vehicle")
    overrides = _solver_overrides(cp["solver"]) if "solver" in cp else {}
    return ExperimentPlan(
        experiment=exp,
        instances=instances,
        trials=p.getint("trials", 1),
        config_overrides=overrides,
        output_path=base / p["output"] if "output" in p else None,
        master_seed=master,
        workers=p.getint("workers", 1),
        vehicle=base / vehicle if vehicle else None,
        vehicle_kind=p.get("vehicle_kind"),
        distance_unit_scale=p.getfloat("distance_unit_scale", 1.0),
        **kwargs,
    )
