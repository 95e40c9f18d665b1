"""Command-line entry point: ``schedsim run|sweep|oracle|tsp``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .aco import run_aco
from .config import ConfigError, load_config
from .harness import run_experiment, summarize, summarize_and_emit
from .io import InputFormatError, read_pool, read_tsp_instance, read_workload
from .model import InvalidInstanceError
from .oracle import OracleSizeError, brute_force_oracle, tsp_brute_force

EXIT_CONFIG = 2
EXIT_IO = 3

log = logging.getLogger("schedsim")


def _cmd_run(args) -> int:
    config = load_config(args.config).restrict(args.algo, args.seed)
    records = run_experiment(config, trace=args.trace, jobs=args.jobs)
    written = summarize_and_emit(records, args.out, "plot" if args.plot else "csv")
    for path in written:
        print(path)
    return 0


def _cmd_sweep(args) -> int:
    config = load_config(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    records = run_experiment(config, trace=args.trace, jobs=args.jobs)
    for path in summarize_and_emit(records, out / "results.csv", "plot"):
        print(path)
    for row in summarize(records):
        print(f"{row['algo']:>7} n={row['n_tasks']:<5} mean completion {row['mean_mean_completion']:.3f} "
              f"± {row['std_mean_completion']:.3f} s  makespan {row['mean_best_makespan']:.3f} s")
    return 0


def _cmd_oracle(args) -> int:
    workload = read_workload(args.workload)
    pool = read_pool(args.pool)
    value, assignment = brute_force_oracle(workload, pool)
    print(json.dumps({"optimal_makespan": value, "placement": list(assignment.placement)}))
    return 0


def _cmd_tsp(args) -> int:
    inst = read_tsp_instance(args.instance)
    config = load_config(args.config)
    seed = args.seed if args.seed is not None else config.seeds[0]
    result = run_aco("tsp", inst, config.aco, seed)
    out = {"seed": seed, "tour": list(result.best), "length": result.best_value}
    if inst.n <= 9:
        best_len, best_tour, _ = tsp_brute_force(inst)
        out["optimal_length"] = best_len
    print(json.dumps(out))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="schedsim", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run the configured experiment and write a records CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--algo", choices=["rr", "aco", "hybrid"])
    p.add_argument("--seed", type=int)
    p.add_argument("--trace", action="store_true", help="also emit one record per iteration")
    p.add_argument("--plot", action="store_true", help="also write a summary CSV and SVG chart")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("sweep", help="full sweep into a directory: results.csv, summary and chart")
    p.add_argument("--config", required=True)
    p.add_argument("--trace", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("oracle", help="exact minimum makespan by enumeration")
    p.add_argument("--workload", required=True)
    p.add_argument("--pool", required=True)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("tsp", help="edge-pheromone ACO on a TSP instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=_cmd_tsp)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, InputFormatError, InvalidInstanceError, OracleSizeError) as exc:
        print(f"schedsim: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"schedsim: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
