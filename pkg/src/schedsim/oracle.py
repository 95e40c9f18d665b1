"""Exhaustive oracles for small instances."""

from __future__ import annotations

import itertools

import numpy as np

from .aco import TspInstance
from .model import Assignment, ResourcePool, Workload, evaluate

MAX_ASSIGNMENTS = 10**7
_CHUNK = 1 << 16


class OracleSizeError(ValueError):
    """The instance has too many candidate solutions to enumerate."""


def brute_force_oracle(workload: Workload, pool: ResourcePool) -> tuple[float, Assignment]:
    """Minimum makespan over every placement of tasks on available resources.

    Placements are enumerated in lexicographic order (task 0 most
    significant), so the first minimiser is the lexicographically smallest.
    """
    ids = pool.available_ids
    k, n = len(ids), len(workload)
    if k ** n > MAX_ASSIGNMENTS:
        raise OracleSizeError(f"{k}^{n} assignments exceed the limit of {MAX_ASSIGNMENTS}")
    # exec_time[t, r]: time of task t on the r-th available resource
    exec_time = workload.lengths[:, None] / pool.mips[ids][None, :]
    weights = k ** np.arange(n - 1, -1, -1, dtype=np.int64)

    best_val, best_idx = np.inf, -1
    total = k ** n
    for start in range(0, total, _CHUNK):
        codes = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        digits = (codes[:, None] // weights[None, :]) % k
        loads = np.zeros((len(codes), k))
        for r in range(k):
            loads[:, r] = (digits == r) @ exec_time[:, r]
        span = loads.max(axis=1)
        # tolerate summation-order rounding when comparing across chunks
        m = span.min()
        if m < best_val * (1 - 1e-12):
            best_val = m
            best_idx = start + int(np.flatnonzero(span <= m * (1 + 1e-12))[0])
    digits = (best_idx // weights) % k
    assignment = Assignment(ids[digits])
    return evaluate(workload, pool, assignment).makespan, assignment


def tsp_brute_force(inst: TspInstance) -> tuple[float, tuple[int, ...], int]:
    """Shortest tour by enumeration; also returns the number of distinct tours.

    Tours are fixed to start at city 0 and a tour and its reverse count once.
    """
    n = inst.n
    best_len, best_tour, distinct = np.inf, None, 0
    for rest in itertools.permutations(range(1, n)):
        if n > 2 and rest[0] > rest[-1]:
            continue  # mirror image already counted
        distinct += 1
        tour = (0, *rest)
        length = inst.tour_length(tour)
        if length < best_len:
            best_len, best_tour = length, tour
    return best_len, best_tour, distinct


def canonical_tour(tour) -> tuple[int, ...]:
    """Rotate to start at city 0 and pick the direction with the smaller second city."""
    t = list(tour)
    k = t.index(0)
    t = t[k:] + t[:k]
    if len(t) > 2 and t[1] > t[-1]:
        t = [t[0]] + t[1:][::-1]
    return tuple(t)
