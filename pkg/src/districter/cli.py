"""Command-line entry point.

Subcommands:

* ``solve``     -- run an algorithm for several seeded trials, writing plan
                   files, trace CSVs and a mean/std summary per metric.
* ``evaluate``  -- planner-facing report for a plan (optionally vs a baseline).
* ``generate``  -- write a synthetic grid instance file.
* ``oracle``    -- exhaustive optimum of a tiny instance.

Exit codes: 0 success, 2 configuration error, 3 instance/plan error,
4 internal invariant breach.  Trials run sequentially unless the
``DISTRICTER_WORKERS`` environment variable asks for a process pool.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .errors import (ConfigError, DistricterError, InstanceError,
                     InternalError)
from .graph import validate_plan
from .growth import guided_growth, seed_plan
from .instances import (generate_grid_instance, load_instance, load_plan,
                        save_instance)
from .local_search import TRACE_HEADER, SearchConfig, run_baseline, run_chain
from .memetic import SPATIAL_TRACE_HEADER, MemeticConfig, spatial_run
from .objective import (ObjectiveConfig, balance_score, compactness_score,
                        planning_report)
from .oracle import exhaustive_optimum


ALGORITHMS = ("spatial", "shc", "sa", "ts", "baa", "bcaa", "aio")
COMPACTNESS_FLAGS = {"pp": "polsby_popper", "edgecut": "edge_cut_proxy"}


def _objective_config(args) -> ObjectiveConfig:
    return ObjectiveConfig(balance_weight=args.balance_weight,
                           balance_band=args.balance_band,
                           compactness_mode=COMPACTNESS_FLAGS[args.compactness])


def _add_objective_flags(parser):
    parser.add_argument("--level", choices=("es", "ms", "hs"), default="es")
    parser.add_argument("--lambda", dest="balance_weight", type=float,
                        default=0.7, help="balance weight in [0, 1]")
    parser.add_argument("--tau", dest="balance_band", type=float, default=0.1,
                        help="soft balance band for validation reports")
    parser.add_argument("--compactness", choices=tuple(COMPACTNESS_FLAGS),
                        default="pp")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="districter",
        description="Balanced, contiguous, compact districting solver")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="run seeded solver trials")
    p.add_argument("--instance", required=True)
    _add_objective_flags(p)
    p.add_argument("--algo", choices=ALGORITHMS, default="spatial")
    p.add_argument("--np", dest="population_size", type=int, default=10)
    p.add_argument("--iters", type=int, default=1000,
                   help="outer iterations (spatial) or proposals (baselines)")
    p.add_argument("--chain-steps", type=int, default=10_000)
    p.add_argument("--pr", dest="worse_accept_prob", type=float, default=0.01)
    p.add_argument("--band", dest="acceptance_band", type=float, default=0.15,
                   help="balance band for the BAA/BCAA samplers")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=25)
    p.add_argument("--warm-start", default=None,
                   help="plan file to initialize from (redistricting mode)")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("evaluate", help="planner metrics for a plan")
    p.add_argument("--plan", required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--baseline", default=None,
                   help="plan to measure displacement against")
    _add_objective_flags(p)
    p.add_argument("--out", default=None, help="write the report JSON here")

    p = sub.add_parser("generate", help="write a synthetic grid instance")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--profile", choices=("uniform", "clustered"),
                   default="uniform")
    p.add_argument("--out", required=True)

    p = sub.add_parser("oracle", help="exhaustive optimum of a tiny instance")
    p.add_argument("--instance", required=True)
    _add_objective_flags(p)
    return parser


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def _search_config(args) -> SearchConfig:
    return SearchConfig(worse_accept_prob=args.worse_accept_prob,
                        max_iters=args.iters,
                        chain_steps=args.chain_steps,
                        acceptance_band=args.acceptance_band)


def _run_trial(instance_path, level, config_kwargs, algo, seed, trial,
               warm_start_path):
    """One seeded run; self-contained so a process pool can execute it."""
    objective = ObjectiveConfig(**config_kwargs["objective"])
    instance = load_instance(instance_path, level, objective)
    rng = np.random.default_rng(seed + trial)
    warm = (load_plan(warm_start_path, instance) if warm_start_path else None)
    search = SearchConfig(**config_kwargs["search"])

    if algo == "spatial":
        mem = MemeticConfig(population_size=config_kwargs["population_size"],
                            iterations=search.max_iters, search=search)
        result = spatial_run(instance, mem, rng, warm_start=warm)
        best, trace, header = result.best_plan, result.trace, \
            SPATIAL_TRACE_HEADER
    else:
        start = warm if warm is not None else guided_growth(
            seed_plan(instance), instance, rng)
        if algo in ("shc", "sa", "ts"):
            best, trace = run_baseline(instance, algo, search, rng, start)
        else:
            summary, best = run_chain(instance, algo, search, rng, start)
            trace = summary.trace_rows()
        header = TRACE_HEADER

    report = validate_plan(best, instance.graph, objective.balance_band,
                           instance.level)
    if not report.hard_ok:
        raise InternalError("solver returned an infeasible plan: "
                            + "; ".join(report.hard_violations))
    return {
        "trial": trial,
        "seed": seed + trial,
        "assignment": [int(x) for x in best.assignment],
        "centers": [int(c) for c in best.centers],
        "balance": balance_score(best, instance),
        "compactness": compactness_score(best, instance),
        "trace": trace,
        "trace_header": header,
    }


def cmd_solve(args) -> int:
    os.makedirs(args.out, exist_ok=True)
    if args.trials < 1:
        raise ConfigError("need at least one trial")
    config_kwargs = {
        "objective": {
            "balance_weight": args.balance_weight,
            "balance_band": args.balance_band,
            "compactness_mode": COMPACTNESS_FLAGS[args.compactness],
        },
        "search": {
            "worse_accept_prob": args.worse_accept_prob,
            "max_iters": args.iters,
            "chain_steps": args.chain_steps,
            "acceptance_band": args.acceptance_band,
        },
        "population_size": args.population_size,
    }
    jobs = [(args.instance, args.level, config_kwargs, args.algo, args.seed,
             t, args.warm_start) for t in range(args.trials)]

    workers = int(os.environ.get("DISTRICTER_WORKERS", "1"))
    if workers > 1 and args.trials > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_trial_star, jobs))
    else:
        results = [_run_trial(*job) for job in jobs]

    per_trial = []
    stem = f"{args.algo}_seed{args.seed}"
    for res in results:
        tag = f"{stem}_trial{res['trial']:02d}"
        plan_file = os.path.join(args.out, f"{tag}_plan.json")
        with open(plan_file, "w") as f:
            json.dump({"assignment": res["assignment"],
                       "centers": res["centers"]},
                      f, sort_keys=True, separators=(",", ":"))
            f.write("\n")
        if res["trace"]:
            with open(os.path.join(args.out, f"{tag}_trace.csv"), "w",
                      newline="") as f:
                writer = csv.writer(f)
                writer.writerow(res["trace_header"])
                writer.writerows(res["trace"])
        per_trial.append({"trial": res["trial"], "seed": res["seed"],
                          "plan_file": os.path.basename(plan_file),
                          "balance": res["balance"],
                          "compactness": res["compactness"]})

    def stats(key):
        values = np.array([t[key] for t in per_trial])
        mean, std = float(values.mean()), float(values.std())
        return {"mean": mean, "std": std,
                "formatted": f"{mean:.4f}±{std:.4f}"}

    summary = {
        "algorithm": args.algo,
        "level": args.level,
        "seed": args.seed,
        "trials": args.trials,
        "balance": stats("balance"),
        "compactness": stats("compactness"),
        "per_trial": per_trial,
    }
    summary_file = os.path.join(args.out, f"{stem}_summary.json")
    with open(summary_file, "w") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    print(f"{args.algo}: balance {summary['balance']['formatted']}  "
          f"compactness {summary['compactness']['formatted']}")
    return 0


def _run_trial_star(job):
    return _run_trial(*job)


# ---------------------------------------------------------------------------
# evaluate / generate / oracle
# ---------------------------------------------------------------------------

def cmd_evaluate(args) -> int:
    instance = load_instance(args.instance, args.level, _objective_config(args))
    plan = load_plan(args.plan, instance)
    baseline = load_plan(args.baseline, instance) if args.baseline else None
    report = planning_report(plan, instance, baseline)
    print(report.to_text())
    if args.out:
        with open(args.out, "w") as f:
            f.write(report.to_json())
            f.write("\n")
    return 0


def cmd_generate(args) -> int:
    instance = generate_grid_instance(args.rows, args.cols, args.k, args.seed,
                                      balance_profile=args.profile)
    save_instance(instance, args.out)
    print(f"wrote {args.rows}x{args.cols} instance with K={args.k} to "
          f"{args.out}")
    return 0


def cmd_oracle(args) -> int:
    instance = load_instance(args.instance, args.level, _objective_config(args))
    result = exhaustive_optimum(instance)
    print(json.dumps({
        "feasible_plans": result.feasible_count,
        "optimal_j": result.best_j,
        "optimal_assignment": [int(x) for x in result.best_plan.assignment],
        "centers": [int(c) for c in result.best_plan.centers],
    }, sort_keys=True))
    return 0


COMMANDS = {"solve": cmd_solve, "evaluate": cmd_evaluate,
            "generate": cmd_generate, "oracle": cmd_oracle}


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(message)s",
                        stream=sys.stderr)
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except InstanceError as exc:
        print(f"instance error: {exc}", file=sys.stderr)
        return 3
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4
    except DistricterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
