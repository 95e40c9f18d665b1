"""Reference schedulers: cyclic Round-Robin and plain cloud-mode ACO."""

from __future__ import annotations

import numpy as np

from .aco import AcoParams, AcoResult, run_aco
from .model import Assignment, NoAvailableResourceError, ResourcePool, Workload


def round_robin(workload: Workload, pool: ResourcePool) -> Assignment:
    """Task t goes to the (t mod k)-th available resource, ignoring lengths and speeds."""
    ids = pool.available_ids
    if len(ids) == 0:
        raise NoAvailableResourceError("no available resource")
    return Assignment(ids[np.arange(len(workload)) % len(ids)])


def pure_aco_schedule(workload: Workload, pool: ResourcePool, params: AcoParams, seed: int) -> AcoResult:
    return run_aco("cloud", (workload, pool), params, seed)
