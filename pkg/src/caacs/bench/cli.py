"""Command line entry point: ``caacs solve|generate|experiment|oracle``.

Exit status is 0 on success, 1 for usage errors and 2 for bad input data
(unparseable files, infeasible parameters, oracle budget exhaustion).
"""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

from ..carbon import carbon_for_instance, load_vehicle_config
from ..engine import VARIANTS, SolverConfig, run
from ..io.generate import GeneratorSpec, generate_random
from ..io.geo import build_geo_instance, read_geo_csv
from ..io.gtsplib import read_gtsplib, write_gtsplib
from ..oracle import DEFAULT_BUDGET, BudgetExceededError, solve_exact
from .harness import instance_seed, run_experiment
from .plan import load_plan

EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load(path: str, k=None, seed=0):
    p = Path(path)
    if p.suffix.lower() == ".csv":
        points = read_geo_csv(p)
        if k is None:
            return build_geo_instance(points, "hint", name=p.stem)
        return build_geo_instance(points, "kmeans", k=k, seed=seed, name=p.stem)
    return read_gtsplib(p)


def _carbon(args, instance):
    consts, profile = load_vehicle_config(args.vehicle, args.vehicle_kind)
    return carbon_for_instance(instance, consts, profile, instance_seed(args.seed, instance.name),
                               args.distance_scale)


def _fmt_tour(instance, nodes):
    if instance.labels:
        return " ".join(str(instance.labels[v]) for v in nodes)
    return " ".join(str(v + 1) for v in nodes)


def cmd_solve(args):
    inst = _load(args.instance, args.k, args.seed)
    carbon = _carbon(args, inst)
    cfg = SolverConfig(variant=args.variant, n_ants=args.ants, a=args.a, seed=args.seed,
                       max_iterations=args.max_iter, stagnation_window=args.stagnation)
    res = run(inst, carbon, cfg)
    t = res.best_tour
    print(f"instance   {inst.name} (N={inst.n_nodes}, M={inst.n_clusters})")
    print(f"variant    {cfg.variant}  ants={cfg.n_ants}  a={cfg.a}  seed={cfg.seed}")
    print(f"cost       {t.cost_total:.6g}")
    print(f"carbon     {t.carbon_total:.6g}")
    print(f"iterations {res.iterations_used}")
    print(f"tour       {_fmt_tour(inst, t.nodes)}")
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["iteration", "best_cost", "best_carbon"])
            for row in res.history:
                w.writerow([row[0], repr(row[1]), repr(row[2])])
        print(f"history    {out}")
    return 0


def cmd_generate(args):
    spec = GeneratorSpec(args.nodes, args.clusters, args.weight_min, args.weight_max, args.seed)
    inst = generate_random(spec, args.name)
    write_gtsplib(inst, args.out)
    print(f"wrote {inst.name} (N={inst.n_nodes}, M={inst.n_clusters}) to {args.out}")
    return 0


def cmd_experiment(args):
    plan = load_plan(args.plan)
    if args.workers is not None:
        plan.workers = args.workers
    if args.out:
        plan.output_path = Path(args.out)
    report = run_experiment(plan)
    n = len(report.records)
    where = plan.output_path if plan.output_path else "(not written; no output path)"
    print(f"{plan.experiment}: {n} trials -> {where}")
    if plan.output_path is None:
        sys.stdout.write(report.to_csv())
    return 0


def cmd_oracle(args):
    inst = _load(args.instance, args.k, args.seed)
    carbon = _carbon(args, inst)
    t = solve_exact(inst, carbon, args.objective, args.budget)
    print(f"instance {inst.name} (N={inst.n_nodes}, M={inst.n_clusters})")
    print(f"objective {args.objective}")
    print(f"cost     {t.cost_total:.10g}")
    print(f"carbon   {t.carbon_total:.10g}")
    print(f"tour     {_fmt_tour(inst, t.nodes)}")
    return 0


def _vehicle_args(p):
    p.add_argument("--vehicle", help="vehicle INI file (default: bundled profiles)")
    p.add_argument("--vehicle-kind", help="profile section in the vehicle file, e.g. LDV")
    p.add_argument("--distance-scale", type=float, default=1.0,
                   help="metres per cost unit when deriving carbon (default 1)")
    p.add_argument("--k", type=int, help="k-means clusters for a geo CSV (default: cluster_hint column)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="caacs", description="Carbon-aware ant colony solvers for the GTSP.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve one instance (.gtsp file or geo .csv)")
    s.add_argument("instance")
    s.add_argument("--variant", choices=VARIANTS, default="caacs")
    s.add_argument("--ants", type=int, default=30)
    s.add_argument("--a", type=float, default=50.0, help="emission base; 0 is neutral")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--max-iter", type=int, default=1000)
    s.add_argument("--stagnation", type=int, default=None, help="stagnation window (default ceil(N/5), 0 off)")
    s.add_argument("--out", help="write the best-so-far history as CSV")
    _vehicle_args(s)
    s.set_defaults(func=cmd_solve)

    g = sub.add_parser("generate", help="write a random instance in GTSPLIB format")
    g.add_argument("--nodes", type=int, required=True)
    g.add_argument("--clusters", type=int)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--name")
    g.add_argument("--weight-min", type=float, default=10.0)
    g.add_argument("--weight-max", type=float, default=5000.0)
    g.set_defaults(func=cmd_generate)

    e = sub.add_parser("experiment", help="run a plan file and write its CSV report")
    e.add_argument("plan")
    e.add_argument("--workers", type=int)
    e.add_argument("--out", help="override the plan's output path")
    e.set_defaults(func=cmd_experiment)

    o = sub.add_parser("oracle", help="exact optimum by enumeration (tiny instances)")
    o.add_argument("instance")
    o.add_argument("--objective", choices=("cost", "carbon"), default="cost")
    o.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    o.add_argument("--seed", type=int, default=0, help="seed for the carbon kinematics")
    _vehicle_args(o)
    o.set_defaults(func=cmd_oracle)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError, BudgetExceededError) as exc:
        print(f"caacs: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
