"""Seeded experiment sweeps comparing Round-Robin, ACO and the hybrid.

Every (algorithm, task count, seed) cell builds its instance from the seed
alone, so all algorithms see the same workload and pool for a given cell
and re-running a config reproduces every numeric column except wall_ms.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np

from . import streams
from .aco import AcoResult
from .baselines import pure_aco_schedule, round_robin
from .config import ExperimentConfig
from .hybrid import run_hybrid
from .model import InvalidInstanceError, ResourcePool, ScheduleMetrics, Workload, evaluate

CSV_HEADER = ["algo", "seed", "n_tasks", "n_resources", "iteration", "best_makespan", "mean_completion", "wall_ms"]
SUMMARY_HEADER = ["algo", "n_tasks", "runs", "mean_mean_completion", "std_mean_completion",
                  "mean_best_makespan", "std_best_makespan"]


@dataclass(frozen=True)
class ExperimentRecord:
    algo: str
    seed: int
    n_tasks: int
    n_resources: int
    iteration: int  # -1 for Round-Robin; max_iterations for a run's final row
    best_makespan: float
    mean_completion: float
    wall_ms: float

    def sort_key(self):
        return (self.algo, self.n_tasks, self.seed, self.iteration)


def _check_range(rng_range, what):
    lo, hi = rng_range
    if not 0 < lo <= hi:
        raise InvalidInstanceError(f"{what}: need 0 < min <= max, got {rng_range}")


def generate_workload(n_tasks: int, task_length_range, seed: int) -> Workload:
    _check_range(task_length_range, "task_length_range")
    lo, hi = task_length_range
    return Workload.from_lengths(streams.stream(seed, streams.WORKLOAD).uniform(lo, hi, n_tasks))


def generate_pool(num_resources: int, mips_range, seed: int) -> ResourcePool:
    _check_range(mips_range, "mips_range")
    lo, hi = mips_range
    return ResourcePool.from_mips(streams.stream(seed, streams.POOL).uniform(lo, hi, num_resources))


@dataclass
class CellRun:
    """One executed (algo, n_tasks, seed) cell with its full result."""

    algo: str
    seed: int
    n_tasks: int
    n_resources: int
    metrics: ScheduleMetrics  # of the returned schedule
    result: Optional[AcoResult]  # None for Round-Robin
    wall_ms: float


def execute_cell(config: ExperimentConfig, algo: str, n_tasks: int, seed: int) -> CellRun:
    workload = generate_workload(n_tasks, config.task_length_range, seed)
    pool = generate_pool(config.num_resources, config.mips_range, seed)
    start = time.perf_counter()
    result = None
    if algo == "rr":
        metrics = evaluate(workload, pool, round_robin(workload, pool))
    elif algo == "aco":
        result = pure_aco_schedule(workload, pool, config.aco, seed)
    elif algo == "hybrid":
        result = run_hybrid((workload, pool), config.hybrid, seed)
    else:
        raise ValueError(f"unknown algorithm {algo!r}")
    wall = (time.perf_counter() - start) * 1e3
    if result is not None:
        metrics = result.best_metrics
    return CellRun(algo, seed, n_tasks, config.num_resources, metrics, result, wall)


def cell_records(run: CellRun, trace: bool = False) -> list[ExperimentRecord]:
    """The run's final record, preceded by per-iteration records if `trace`."""
    head = (run.algo, run.seed, run.n_tasks, run.n_resources)
    if run.result is None:
        return [ExperimentRecord(*head, -1, run.metrics.makespan, run.metrics.mean_completion, run.wall_ms)]
    records = []
    if trace:
        records = [ExperimentRecord(*head, s.iteration, s.best_so_far, s.best_mean_completion, run.wall_ms)
                   for s in run.result.trace]
    records.append(ExperimentRecord(*head, len(run.result.trace), run.metrics.makespan,
                                    run.metrics.mean_completion, run.wall_ms))
    return records


def run_cell(config: ExperimentConfig, algo: str, n_tasks: int, seed: int, trace: bool = False) -> list[ExperimentRecord]:
    return cell_records(execute_cell(config, algo, n_tasks, seed), trace)


def _cell(args):
    return run_cell(*args)


def run_experiment(config: ExperimentConfig, trace: bool = False, jobs: int = 1) -> list[ExperimentRecord]:
    cells = [(config, a, n, s, trace) for a in config.algorithms for n in config.task_counts for s in config.seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            chunks = list(ex.map(_cell, cells))
    else:
        chunks = [_cell(c) for c in cells]
    return sorted((rec for chunk in chunks for rec in chunk), key=ExperimentRecord.sort_key)


def final_records(records) -> list[ExperimentRecord]:
    """The last record of every (algo, n_tasks, seed) run."""
    last = {}
    for rec in sorted(records, key=ExperimentRecord.sort_key):
        last[(rec.algo, rec.n_tasks, rec.seed)] = rec
    return list(last.values())


# ------------------------------------------------------------------- emission


def write_csv(records, path) -> None:
    if not records:
        raise ValueError("no records to write")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for rec in records:
            # repr keeps floats round-trippable
            w.writerow([rec.algo, rec.seed, rec.n_tasks, rec.n_resources, rec.iteration,
                        repr(rec.best_makespan), repr(rec.mean_completion), repr(rec.wall_ms)])


def read_csv(path) -> list[ExperimentRecord]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        types = [f.type for f in fields(ExperimentRecord)]
        conv = {"str": str, "int": int, "float": float}
        return [ExperimentRecord(*(conv[t](v) for t, v in zip(types, row))) for row in reader]


def summarize(records) -> list[dict]:
    """Mean and (population) standard deviation per (algo, n_tasks) over final records."""
    groups: dict = {}
    for rec in final_records(records):
        groups.setdefault((rec.algo, rec.n_tasks), []).append(rec)
    rows = []
    for (algo, n), recs in sorted(groups.items()):
        mc = np.array([r.mean_completion for r in recs])
        mk = np.array([r.best_makespan for r in recs])
        rows.append({"algo": algo, "n_tasks": n, "runs": len(recs),
                     "mean_mean_completion": float(mc.mean()), "std_mean_completion": float(mc.std()),
                     "mean_best_makespan": float(mk.mean()), "std_best_makespan": float(mk.std())})
    return rows


def write_summary(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=SUMMARY_HEADER)
        w.writeheader()
        for row in rows:
            w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})


def plot_summary(rows, path) -> None:
    """Grouped bars of mean completion time per task count, one bar per algorithm."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    algos = [a for a in ("rr", "aco", "hybrid") if any(r["algo"] == a for r in rows)]
    counts = sorted({r["n_tasks"] for r in rows})
    lookup = {(r["algo"], r["n_tasks"]): r for r in rows}
    width = 0.8 / len(algos)
    x = np.arange(len(counts))
    fig, ax = plt.subplots(figsize=(7, 4))
    for k, algo in enumerate(algos):
        cells = [lookup.get((algo, n)) for n in counts]
        means = [c["mean_mean_completion"] if c else np.nan for c in cells]
        stds = [c["std_mean_completion"] if c else 0.0 for c in cells]
        ax.bar(x + (k - (len(algos) - 1) / 2) * width, means, width, yerr=stds, capsize=3, label=algo)
    ax.set_xticks(x, [str(n) for n in counts])
    ax.set_xlabel("number of tasks (desk-scale stand-in sweep)")
    ax.set_ylabel("mean task completion time (s)")
    ax.set_title("Average task execution time by scheduler")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg")
    plt.close(fig)


def summarize_and_emit(records, out_path, format: str = "csv") -> list[Path]:
    """Write the records CSV; ``plot`` also writes ``<stem>_summary.csv`` and ``<stem>.svg``."""
    if not records:
        raise ValueError("no records to emit")
    out = Path(out_path)
    write_csv(records, out)
    written = [out]
    if format == "plot":
        rows = summarize(records)
        summary = out.with_name(out.stem + "_summary.csv")
        svg = out.with_suffix(".svg")
        write_summary(rows, summary)
        plot_summary(rows, svg)
        written += [summary, svg]
    elif format != "csv":
        raise ValueError(f"unknown format {format!r}")
    return written


def numeric_columns(records) -> list[tuple]:
    """Every column except wall_ms, for determinism comparisons."""
    return [astuple(r)[:-1] for r in records]
