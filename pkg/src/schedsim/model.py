"""Task/resource data model and the scheduling objective.

Tasks carry a compute length in million instructions (MI); resources
(virtual machines) carry a processing rate in MIPS.  An assignment maps
every task id to the id of the resource that executes it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class InvalidInstanceError(ValueError):
    """A task, resource or container violates its construction invariants."""


class InvalidAssignmentError(ValueError):
    """A placement does not fit the workload/pool it is evaluated against."""


class NoAvailableResourceError(ValueError):
    """Every resource in the pool is marked unavailable."""


@dataclass(frozen=True)
class Task:
    id: int
    length: float  # MI

    def __post_init__(self):
        if not self.length > 0:
            raise InvalidInstanceError(f"task {self.id}: length must be > 0, got {self.length}")


@dataclass(frozen=True)
class Resource:
    id: int
    mips: float
    available: bool = True

    def __post_init__(self):
        if not self.mips > 0:
            raise InvalidInstanceError(f"resource {self.id}: mips must be > 0, got {self.mips}")


@dataclass(frozen=True)
class Workload:
    tasks: tuple[Task, ...]
    lengths: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        tasks = tuple(self.tasks)
        if not tasks:
            raise InvalidInstanceError("workload must contain at least one task")
        if [t.id for t in tasks] != list(range(len(tasks))):
            raise InvalidInstanceError("task ids must be 0..n-1 in order")
        lengths = np.array([t.length for t in tasks], dtype=float)
        lengths.flags.writeable = False
        object.__setattr__(self, "tasks", tasks)
        object.__setattr__(self, "lengths", lengths)

    @classmethod
    def from_lengths(cls, lengths: Sequence[float]) -> "Workload":
        return cls(tuple(Task(i, float(x)) for i, x in enumerate(lengths)))

    def __len__(self):
        return len(self.tasks)


@dataclass(frozen=True)
class ResourcePool:
    resources: tuple[Resource, ...]
    mips: np.ndarray = field(init=False, repr=False, compare=False)
    available: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        resources = tuple(self.resources)
        if not resources:
            raise InvalidInstanceError("resource pool must contain at least one resource")
        if [r.id for r in resources] != list(range(len(resources))):
            raise InvalidInstanceError("resource ids must be 0..r-1 in order")
        if not any(r.available for r in resources):
            raise NoAvailableResourceError("resource pool has no available resource")
        mips = np.array([r.mips for r in resources], dtype=float)
        avail = np.array([r.available for r in resources], dtype=bool)
        mips.flags.writeable = False
        avail.flags.writeable = False
        object.__setattr__(self, "resources", resources)
        object.__setattr__(self, "mips", mips)
        object.__setattr__(self, "available", avail)

    @classmethod
    def from_mips(cls, mips: Sequence[float], available: Sequence[bool] | None = None) -> "ResourcePool":
        if available is None:
            available = [True] * len(mips)
        return cls(tuple(Resource(i, float(m), bool(a)) for i, (m, a) in enumerate(zip(mips, available))))

    @property
    def available_ids(self) -> np.ndarray:
        return np.flatnonzero(self.available)

    def __len__(self):
        return len(self.resources)


@dataclass(frozen=True)
class Assignment:
    """placement[t] is the id of the resource that runs task t."""

    placement: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "placement", tuple(int(p) for p in self.placement))

    def as_array(self) -> np.ndarray:
        return np.asarray(self.placement, dtype=np.int64)

    def __len__(self):
        return len(self.placement)


@dataclass(frozen=True)
class ScheduleMetrics:
    makespan: float
    mean_completion: float
    resource_loads: tuple[float, ...]


def execution_time(task: Task, resource: Resource) -> float:
    if not resource.available:
        raise InvalidAssignmentError(f"resource {resource.id} is unavailable")
    return task.length / resource.mips


def validate_placement(workload: Workload, pool: ResourcePool, placement) -> np.ndarray:
    """Return `placement` as an int array, raising if it is not a valid assignment."""
    arr = np.asarray(placement)
    if arr.ndim != 1 or arr.shape[0] != len(workload):
        raise InvalidAssignmentError(
            f"placement has length {arr.shape[0] if arr.ndim else 0}, expected {len(workload)}"
        )
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        raise InvalidAssignmentError("placement entries must be integers")
    arr = arr.astype(np.int64, copy=False)
    if arr.size and (arr.min() < 0 or arr.max() >= len(pool)):
        raise InvalidAssignmentError("placement refers to a resource id outside the pool")
    if not pool.available[arr].all():
        bad = int(arr[~pool.available[arr]][0])
        raise InvalidAssignmentError(f"placement uses unavailable resource {bad}")
    return arr


def resource_loads(workload: Workload, pool: ResourcePool, placement: np.ndarray) -> np.ndarray:
    """Busy time per resource; no validation (hot path for the optimizers)."""
    times = workload.lengths / pool.mips[placement]
    return np.bincount(placement, weights=times, minlength=len(pool))


def makespan(workload: Workload, pool: ResourcePool, placement: np.ndarray) -> float:
    return float(resource_loads(workload, pool, placement).max())


def evaluate(workload: Workload, pool: ResourcePool, assignment) -> ScheduleMetrics:
    """Makespan, mean task completion time and per-resource loads.

    Tasks sharing a resource run back to back in ascending task id, so a
    task's completion time is the running sum of execution times on its
    resource up to and including itself.
    """
    placement = assignment.placement if isinstance(assignment, Assignment) else assignment
    return metrics_unchecked(workload, pool, validate_placement(workload, pool, placement))


def metrics_unchecked(workload: Workload, pool: ResourcePool, placement: np.ndarray) -> ScheduleMetrics:
    """`evaluate` for a placement already known to be valid."""
    times = workload.lengths / pool.mips[placement]
    loads = np.bincount(placement, weights=times, minlength=len(pool))

    order = np.argsort(placement, kind="stable")  # stable keeps ascending task id per resource
    sorted_res = placement[order]
    cum = np.cumsum(times[order])
    # subtract the cumulative time of all earlier resources' tasks
    boundary = np.flatnonzero(sorted_res[1:] != sorted_res[:-1]) + 1
    offset = np.zeros_like(cum)
    offset[boundary] = cum[boundary - 1]
    completion = cum - np.maximum.accumulate(offset)

    return ScheduleMetrics(
        makespan=float(loads.max()),
        mean_completion=float(completion.mean()),
        resource_loads=tuple(loads.tolist()),
    )


def affinity(metrics: ScheduleMetrics) -> float:
    return 1.0 / metrics.makespan
