"""CSV readers and writers for workloads, resource pools and TSP instances."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .aco import TspInstance
from .model import ResourcePool, Workload


class InputFormatError(ValueError):
    """An input CSV has the wrong header or malformed rows."""


def _rows(path, header: list[str]) -> list[dict]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [h.strip() for h in reader.fieldnames] != header:
            raise InputFormatError(f"{path}: expected header {','.join(header)}, got {reader.fieldnames}")
        return list(reader)


def read_workload(path) -> Workload:
    rows = _rows(path, ["task_id", "length_mi"])
    try:
        rows = sorted(((int(r["task_id"]), float(r["length_mi"])) for r in rows))
    except (TypeError, ValueError) as exc:
        raise InputFormatError(f"{path}: {exc}") from None
    if [i for i, _ in rows] != list(range(len(rows))):
        raise InputFormatError(f"{path}: task ids must be 0..n-1")
    try:
        return Workload.from_lengths([x for _, x in rows])
    except ValueError as exc:
        raise InputFormatError(f"{path}: {exc}") from None


def read_pool(path) -> ResourcePool:
    rows = _rows(path, ["vm_id", "mips", "available"])
    try:
        rows = sorted((int(r["vm_id"]), float(r["mips"]), r["available"].strip()) for r in rows)
    except (TypeError, ValueError) as exc:
        raise InputFormatError(f"{path}: {exc}") from None
    if [i for i, _, _ in rows] != list(range(len(rows))):
        raise InputFormatError(f"{path}: vm ids must be 0..r-1")
    if any(a not in ("0", "1") for _, _, a in rows):
        raise InputFormatError(f"{path}: available must be 0 or 1")
    try:
        return ResourcePool.from_mips([m for _, m, _ in rows], [a == "1" for _, _, a in rows])
    except ValueError as exc:
        raise InputFormatError(f"{path}: {exc}") from None


def write_workload(workload: Workload, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["task_id", "length_mi"])
        for t in workload.tasks:
            w.writerow([t.id, repr(t.length)])


def write_pool(pool: ResourcePool, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["vm_id", "mips", "available"])
        for r in pool.resources:
            w.writerow([r.id, repr(r.mips), int(r.available)])


def read_tsp_instance(path) -> TspInstance:
    """Either an edge list with header ``i,j,distance`` or a headerless square matrix."""
    lines = [ln.strip() for ln in Path(path).read_text().splitlines() if ln.strip()]
    if not lines:
        raise InputFormatError(f"{path}: empty file")
    try:
        if [c.strip() for c in lines[0].split(",")] == ["i", "j", "distance"]:
            edges = [ln.split(",") for ln in lines[1:]]
            n = 1 + max(max(int(i), int(j)) for i, j, _ in edges)
            dist = np.zeros((n, n))
            for i, j, d in edges:
                dist[int(i), int(j)] = dist[int(j), int(i)] = float(d)
        else:
            dist = np.array([[float(c) for c in ln.split(",")] for ln in lines])
        return TspInstance(dist)
    except ValueError as exc:
        raise InputFormatError(f"{path}: {exc}") from None
