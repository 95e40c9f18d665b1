"""Cloud-mode ACO with a clonal-selection refinement inside every iteration.

The ants' assignments seed a CSA population; after a few CSA generations
the refined population replaces the ant solutions for the pheromone
update, and the refined best competes for the global best.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from . import streams
from .aco import AcoParams, AcoResult, CloudIteration, Loads, NodePheromoneState, cloud_iteration, run_aco
from .csa import CsaParams, ScheduleProblem, run_csa


@dataclass(frozen=True)
class HybridParams:
    aco: AcoParams = field(default_factory=AcoParams)
    csa: CsaParams = field(default_factory=CsaParams)
    csa_generations_per_iteration: int = 20

    def __post_init__(self):
        g = self.csa_generations_per_iteration
        if int(g) != g or g < 0:
            raise ValueError(f"csa_generations_per_iteration must be a non-negative integer, got {g}")


def csa_refiner(workload, pool, params: HybridParams, seed: int):
    """Iteration hook that refines the ants' solutions with clonal selection."""
    problem = ScheduleProblem(workload, pool)
    gens = params.csa_generations_per_iteration
    csa = params.csa.replace(
        pop_size=params.aco.num_ants,
        generations=max(gens, 1),
        replace_count=min(params.csa.replace_count, params.aco.num_ants),
    )

    def hook(iteration: int, solutions: list) -> list:
        if gens == 0:
            return solutions
        rng = streams.stream(seed, streams.CSA, iteration)
        result = run_csa(problem, csa, rng, seed_population=[p for p, _ in solutions])
        pop = result.population
        return [(g, Loads(float(l.max()), l)) for g, l in zip(pop.genotypes, problem.loads(pop.genotypes))]

    return hook


def hybrid_iterate(state: NodePheromoneState, problem, params: HybridParams, seed: int, iteration: int,
                   global_best=None) -> tuple[NodePheromoneState, CloudIteration]:
    """One hybrid iteration; `state` is updated in place and returned."""
    workload, pool = problem
    hook = csa_refiner(workload, pool, params, seed)
    step = cloud_iteration(state, workload, pool, params.aco, seed, iteration, global_best, hook)
    return state, step


def run_hybrid(problem, params: HybridParams, seed: int) -> AcoResult:
    workload, pool = problem
    return run_aco("cloud", problem, params.aco, seed, csa_refiner(workload, pool, params, seed))
