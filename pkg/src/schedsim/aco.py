"""Ant colony optimization in two modes.

``tsp`` mode is the classic edge-pheromone ant system on a symmetric
travelling-salesman instance: ants build tours city by city, every
completed edge gets a local update, and after all ants finish only the
best tour found so far receives the global deposit.

``cloud`` mode keeps one pheromone value per resource.  Each ant places
every task on a resource sampled with probability proportional to
``tau_j**alpha * eta_j**beta`` where the heuristic ``eta_j`` is the
resource's initial pheromone, proportional to the square root of its MIPS
rating.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from . import streams
from .model import (
    Assignment,
    NoAvailableResourceError,
    ResourcePool,
    ScheduleMetrics,
    Workload,
    metrics_unchecked,
    resource_loads,
)


class EmptyFrontierError(ValueError):
    """Every city has already been visited."""


@dataclass(frozen=True)
class AcoParams:
    alpha: float = 1.0  # pheromone importance
    beta: float = 2.0  # heuristic importance
    rho: float = 0.1  # local update weight
    alpha_g: float = 0.1  # global evaporation coefficient
    q: float = 100.0
    tau0: float = 1.0
    num_ants: int = 10
    max_iterations: int = 100

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be >= 0")
        if not 0 < self.rho < 1:
            raise ValueError(f"rho must lie in (0, 1), got {self.rho}")
        if not 0 < self.alpha_g < 1:
            raise ValueError(f"alpha_g must lie in (0, 1), got {self.alpha_g}")
        if not self.q > 0 or not self.tau0 > 0:
            raise ValueError("q and tau0 must be > 0")
        if int(self.num_ants) != self.num_ants or self.num_ants < 1:
            raise ValueError(f"num_ants must be a positive integer, got {self.num_ants}")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ValueError(f"max_iterations must be a positive integer, got {self.max_iterations}")


def limit_params(**kw) -> AcoParams:
    """AcoParams without range checks, for probing the update rules at rho/alpha_g = 0."""
    obj = object.__new__(AcoParams)
    for f in fields(AcoParams):
        object.__setattr__(obj, f.name, kw.pop(f.name, f.default))
    if kw:
        raise TypeError(f"unknown AcoParams fields: {sorted(kw)}")
    return obj


def best_solution(values: Sequence[float]) -> tuple[int, float]:
    """Index and value of the minimum; ties go to the smallest index."""
    if len(values) == 0:
        raise ValueError("best_solution of an empty sequence")
    idx = int(np.argmin(values))  # argmin returns the first occurrence
    return idx, values[idx]


def _roulette(weights: np.ndarray, u: float) -> int:
    cum = weights.cumsum()
    idx = int(cum.searchsorted(u * cum[-1], side="right"))
    if idx >= len(weights) or weights[idx] == 0:
        idx = int(np.flatnonzero(weights)[-1])
    return idx


@dataclass
class IterationStats:
    iteration: int
    raw_best: float  # best objective among the ants' own constructions
    iteration_best: float  # best objective of the solution set used for the update
    best_so_far: float
    best_mean_completion: float = float("nan")


@dataclass
class AcoResult:
    best: object  # Assignment (cloud) or tuple of cities (tsp)
    best_value: float
    trace: list[IterationStats]
    state: object
    best_metrics: Optional[ScheduleMetrics] = None

    @property
    def objective_trace(self) -> list[float]:
        return [s.best_so_far for s in self.trace]


# --------------------------------------------------------------------------- TSP


@dataclass(frozen=True)
class TspInstance:
    dist: np.ndarray
    _eta_cache: dict = field(default_factory=dict, init=False, compare=False, repr=False)

    def __post_init__(self):
        d = np.array(self.dist, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] < 2:
            raise ValueError("distance matrix must be square with n >= 2")
        if not np.allclose(d, d.T, rtol=0, atol=0):
            raise ValueError("distance matrix must be symmetric")
        if np.any(np.diag(d) != 0):
            raise ValueError("distance matrix diagonal must be zero")
        off = ~np.eye(len(d), dtype=bool)
        if not np.all(d[off] > 0):
            raise ValueError("off-diagonal distances must be > 0")
        d.flags.writeable = False
        object.__setattr__(self, "dist", d)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    def tour_length(self, tour: Sequence[int]) -> float:
        t = np.asarray(tour)
        return float(self.dist[t, np.roll(t, -1)].sum())


@dataclass
class EdgePheromoneState:
    tau: np.ndarray

    @classmethod
    def initial(cls, inst: TspInstance, params: AcoParams) -> "EdgePheromoneState":
        tau = np.full((inst.n, inst.n), params.tau0)
        np.fill_diagonal(tau, 0.0)
        return cls(tau)


@dataclass
class TourState:
    current_city: int
    visited: list[int]
    partial_length: float = 0.0
    tour: list[int] = field(default_factory=list)
    tour_length: Optional[float] = None

    @classmethod
    def start(cls, city: int) -> "TourState":
        return cls(current_city=city, visited=[city], tour=[city])

    @property
    def complete(self) -> bool:
        return self.tour_length is not None


def _eta_pow(inst: TspInstance, beta: float) -> np.ndarray:
    """(1 / d_ij) ** beta with zeros on the diagonal (cached per instance)."""
    eta = inst._eta_cache.get(beta)
    if eta is None:
        d = inst.dist
        eta = np.divide(1.0, d, out=np.zeros_like(d), where=d > 0) ** beta
        eta.flags.writeable = False
        inst._eta_cache[beta] = eta
    return eta


def _frontier_probs(tau_row: np.ndarray, eta_row: np.ndarray, blocked: np.ndarray, alpha: float) -> np.ndarray:
    w = tau_row ** alpha * eta_row
    w[blocked] = 0.0
    total = w.sum()
    if total <= 0 or not np.isfinite(total):
        # all pheromone on the frontier vanished numerically: fall back to uniform
        w = (~blocked).astype(float)
        total = w.sum()
    return w / total


def tsp_transition_probs(state: EdgePheromoneState, inst: TspInstance, tour: TourState,
                         params: AcoParams) -> np.ndarray:
    blocked = np.zeros(inst.n, dtype=bool)
    blocked[tour.visited] = True  # includes the current city
    if blocked.all():
        raise EmptyFrontierError("all cities visited")
    i = tour.current_city
    return _frontier_probs(state.tau[i], _eta_pow(inst, params.beta)[i], blocked, params.alpha)


def tsp_local_update(state: EdgePheromoneState, edge: tuple[int, int], delta: float,
                     params: AcoParams) -> EdgePheromoneState:
    """tau_ij <- (1 - rho) * tau_ij + rho * delta on both directions of the edge."""
    i, j = edge
    if i == j:
        raise ValueError("edge endpoints must differ")
    new = (1.0 - params.rho) * state.tau[i, j] + params.rho * delta
    state.tau[i, j] = new
    state.tau[j, i] = new
    return state


def local_deposit(q: float, partial_length: float) -> float:
    return q / partial_length


def _advance(tour: TourState, city: int, inst: TspInstance):
    tour.partial_length += inst.dist[tour.current_city, city]
    tour.current_city = city
    tour.visited.append(city)
    tour.tour.append(city)


def tsp_construct_tour(state: EdgePheromoneState, inst: TspInstance, params: AcoParams,
                       rng: np.random.Generator, local_update: bool = True) -> TourState:
    """One ant's complete tour, updating each edge as soon as it is traversed."""
    eta = _eta_pow(inst, params.beta)
    tour = TourState.start(int(rng.integers(inst.n)))
    blocked = np.zeros(inst.n, dtype=bool)
    blocked[tour.current_city] = True
    while len(tour.visited) < inst.n:
        prev = tour.current_city
        probs = _frontier_probs(state.tau[prev], eta[prev], blocked, params.alpha)
        nxt = _roulette(probs, rng.random())
        _advance(tour, nxt, inst)
        blocked[nxt] = True
        if local_update:
            tsp_local_update(state, (prev, nxt), local_deposit(params.q, tour.partial_length), params)
    start, last = tour.tour[0], tour.current_city
    tour.tour_length = tour.partial_length + inst.dist[last, start]
    if local_update:
        tsp_local_update(state, (last, start), local_deposit(params.q, tour.tour_length), params)
    return tour


def tour_edges(tour: Sequence[int]):
    return [(tour[k], tour[(k + 1) % len(tour)]) for k in range(len(tour))]


def tsp_global_update(state: EdgePheromoneState, best_tour: TourState, params: AcoParams) -> EdgePheromoneState:
    """Evaporate every edge by (1 - alpha_g); edges of the best tour also gain alpha_g / l_best."""
    if not best_tour.complete:
        raise ValueError("global update needs a complete tour")
    state.tau *= 1.0 - params.alpha_g
    deposit = params.alpha_g / best_tour.tour_length
    for i, j in tour_edges(best_tour.tour):
        state.tau[i, j] += deposit
        if i != j:
            state.tau[j, i] += deposit
    return state


def _run_tsp(inst: TspInstance, params: AcoParams, seed: int, hook) -> AcoResult:
    if inst.n < 2:
        raise ValueError("tsp mode needs n >= 2")
    state = EdgePheromoneState.initial(inst, params)
    best: Optional[TourState] = None
    trace = []
    for it in range(params.max_iterations):
        tours = [tsp_construct_tour(state, inst, params, streams.stream(seed, streams.ANT, it, a))
                 for a in range(params.num_ants)]
        raw_idx, raw_val = best_solution([t.tour_length for t in tours])
        if hook is not None:
            tours = hook(it, tours)
        idx, val = best_solution([t.tour_length for t in tours])
        if best is None or val < best.tour_length:
            best = tours[idx]
        tsp_global_update(state, best, params)
        trace.append(IterationStats(it, raw_val, val, best.tour_length))
    return AcoResult(tuple(best.tour), best.tour_length, trace, state)


# ------------------------------------------------------------------------- cloud


@dataclass
class NodePheromoneState:
    tau: np.ndarray
    tau0_per_node: np.ndarray

    @classmethod
    def initial(cls, pool: ResourcePool, params: AcoParams) -> "NodePheromoneState":
        """tau_j(0) = tau0 * sqrt(mips_j / mean available mips).

        The square root makes eta_j**beta proportional to MIPS at the default
        beta = 2, i.e. the prior selection weight of a VM matches its share of
        total capacity, which is the load-balancing split for tasks placed
        independently.
        """
        rel = pool.mips / pool.mips[pool.available].mean()
        tau0 = params.tau0 * np.sqrt(rel)
        return cls(tau0.copy(), tau0)

    def copy(self) -> "NodePheromoneState":
        return NodePheromoneState(self.tau.copy(), self.tau0_per_node.copy())


def cloud_transition_probs(state: NodePheromoneState, pool: ResourcePool, params: AcoParams) -> np.ndarray:
    if not pool.available.any():
        raise NoAvailableResourceError("no available resource")
    w = np.zeros(len(pool))
    av = pool.available
    w[av] = state.tau[av] ** params.alpha * state.tau0_per_node[av] ** params.beta
    total = w.sum()
    if total <= 0 or not np.isfinite(total):
        w[av] = 1.0
        total = w.sum()
    return w / total


def _sample_placement(probs: np.ndarray, n_tasks: int, rng: np.random.Generator) -> np.ndarray:
    cum = np.cumsum(probs)
    idx = np.searchsorted(cum, rng.random(n_tasks) * cum[-1], side="right")
    last = int(np.flatnonzero(probs)[-1])
    return np.minimum(idx, last).astype(np.int64)


def cloud_construct_assignment(state: NodePheromoneState, workload: Workload, pool: ResourcePool,
                               params: AcoParams, rng: np.random.Generator) -> Assignment:
    """Place tasks in ascending id order, each on an independently sampled resource."""
    probs = cloud_transition_probs(state, pool, params)
    return Assignment(_sample_placement(probs, len(workload), rng))


class Loads(NamedTuple):
    """The part of ScheduleMetrics the pheromone update reads."""

    makespan: float
    resource_loads: np.ndarray


def loads_of(workload: Workload, pool: ResourcePool, placement: np.ndarray) -> Loads:
    loads = resource_loads(workload, pool, placement)
    return Loads(float(loads.max()), loads)


Solution = tuple  # (placement array, ScheduleMetrics or Loads)


def _placement(a) -> np.ndarray:
    return a.as_array() if isinstance(a, Assignment) else np.asarray(a, dtype=np.int64)


def cloud_pheromone_update(state: NodePheromoneState, ant_solutions: Sequence[Solution],
                           global_best: Solution, params: AcoParams, pool: ResourcePool = None) -> NodePheromoneState:
    """Per-ant local steps, then the global step driven by the global best.

    Local, for each ant in order and each resource j it used:
        tau_j <- (1 - rho) tau_j + rho * q / load_j(ant)
    Global: tau_j <- (1 - alpha_g) tau_j, plus alpha_g / makespan_best on
    resources used by the global best.  Unavailable resources are frozen.
    """
    tau = state.tau
    for _, metrics in ant_solutions:
        loads = np.asarray(metrics.resource_loads)
        used = loads > 0
        tau[used] = (1.0 - params.rho) * tau[used] + params.rho * (params.q / loads[used])

    evap = pool.available if pool is not None else np.ones(len(tau), dtype=bool)
    tau[evap] *= 1.0 - params.alpha_g
    on_best = (np.asarray(global_best[1].resource_loads) > 0) & evap
    tau[on_best] += params.alpha_g / global_best[1].makespan
    return state


IterationHook = Callable[[int, list], list]


@dataclass
class CloudIteration:
    solutions: list  # solution set used for the pheromone update
    raw_best: Solution
    iteration_best: Solution
    global_best: Solution


def cloud_iteration(state: NodePheromoneState, workload: Workload, pool: ResourcePool, params: AcoParams,
                    seed: int, iteration: int, global_best: Optional[Solution] = None,
                    hook: Optional[IterationHook] = None) -> CloudIteration:
    """One construct -> evaluate -> (hook) -> pheromone update cycle; mutates `state`."""
    probs = cloud_transition_probs(state, pool, params)
    sols = []
    for a in range(params.num_ants):
        p = _sample_placement(probs, len(workload), streams.stream(seed, streams.ANT, iteration, a))
        sols.append((p, loads_of(workload, pool, p)))
    raw_idx, _ = best_solution([m.makespan for _, m in sols])
    raw_best = sols[raw_idx]
    if hook is not None:
        sols = hook(iteration, sols)
    idx, _ = best_solution([m.makespan for _, m in sols])
    it_best = sols[idx]
    if global_best is None or it_best[1].makespan < global_best[1].makespan:
        global_best = (it_best[0], metrics_unchecked(workload, pool, it_best[0]))
    cloud_pheromone_update(state, sols, global_best, params, pool)
    return CloudIteration(sols, raw_best, it_best, global_best)


def _run_cloud(problem, params: AcoParams, seed: int, hook) -> AcoResult:
    workload, pool = problem
    state = NodePheromoneState.initial(pool, params)
    gbest = None
    trace = []
    for it in range(params.max_iterations):
        step = cloud_iteration(state, workload, pool, params, seed, it, gbest, hook)
        gbest = step.global_best
        trace.append(IterationStats(it, step.raw_best[1].makespan, step.iteration_best[1].makespan,
                                    gbest[1].makespan, gbest[1].mean_completion))
    return AcoResult(Assignment(gbest[0]), gbest[1].makespan, trace, state, gbest[1])


def run_aco(mode: str, problem, params: AcoParams, seed: int,
            iteration_hook: Optional[IterationHook] = None) -> AcoResult:
    """Run `params.max_iterations` ACO iterations.

    `problem` is a TspInstance for mode ``"tsp"`` and a ``(workload, pool)``
    pair for mode ``"cloud"``.  `iteration_hook(iteration, solutions)` may
    return a replacement solution set before pheromone is updated.
    """
    if mode == "tsp":
        return _run_tsp(problem, params, seed, iteration_hook)
    if mode == "cloud":
        return _run_cloud(problem, params, seed, iteration_hook)
    raise ValueError(f"unknown mode {mode!r}")
