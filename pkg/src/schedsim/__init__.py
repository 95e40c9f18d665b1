"""Ant colony / clonal selection hybrid for cloud task scheduling."""

from .aco import AcoParams, TspInstance, run_aco
from .baselines import pure_aco_schedule, round_robin
from .csa import CsaParams, run_csa
from .hybrid import HybridParams, run_hybrid
from .model import Assignment, Resource, ResourcePool, ScheduleMetrics, Task, Workload, evaluate

__all__ = [
    "AcoParams", "Assignment", "CsaParams", "HybridParams", "Resource", "ResourcePool", "ScheduleMetrics",
    "Task", "TspInstance", "Workload", "evaluate", "pure_aco_schedule", "round_robin", "run_aco", "run_csa",
    "run_hybrid",
]
