"""Clonal selection over assignment vectors or tours.

One generation is::

    evaluate(P) -> clone -> hypermutate clones -> evaluate clones
      -> age both populations -> select next P

Hypermutation reverses one contiguous segment of a clone's genotype.  The
best antibody has its age reset during aging and is always kept by
selection, so the best affinity in the population never decreases.

Populations are stored column-wise (genotype matrix, affinity vector, age
vector); `Antibody` is the row view handed out to callers.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from typing import Optional, Sequence

import numpy as np

from .aco import TspInstance
from .model import ResourcePool, Workload, makespan, validate_placement


@dataclass(frozen=True)
class CsaParams:
    pop_size: int = 10
    clone_factor: int = 2
    mutation_rate: float = 1.0  # chance that a clone gets one segment reversal
    t_beta: int = 5
    replace_count: int = 1
    generations: int = 20

    def __post_init__(self):
        for name in ("pop_size", "clone_factor", "t_beta", "generations"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v}")
        if not 0 <= self.mutation_rate <= 1:
            raise ValueError(f"mutation_rate must lie in [0, 1], got {self.mutation_rate}")
        if int(self.replace_count) != self.replace_count or not 0 <= self.replace_count <= self.pop_size:
            raise ValueError(f"replace_count must be in 0..pop_size, got {self.replace_count}")

    def replace(self, **kw) -> "CsaParams":
        return CsaParams(**{**{f.name: getattr(self, f.name) for f in fields(self)}, **kw})


class ScheduleProblem:
    """Makespan minimisation over task->resource placements."""

    def __init__(self, workload: Workload, pool: ResourcePool):
        self.workload = workload
        self.pool = pool
        self._ids = pool.available_ids

    @property
    def size(self) -> int:
        return len(self.workload)

    def objective(self, genotype: np.ndarray) -> float:
        return makespan(self.workload, self.pool, genotype)

    def loads(self, genotypes: np.ndarray) -> np.ndarray:
        """Per-resource loads, one row per genotype.

        Each bin accumulates in the same order as a single-row bincount, so
        rows match `model.resource_loads` bit for bit.
        """
        rows, r = genotypes.shape[0], len(self.pool)
        times = self.workload.lengths[None, :] / self.pool.mips[genotypes]
        bins = (genotypes + r * np.arange(rows)[:, None]).ravel()
        return np.bincount(bins, weights=times.ravel(), minlength=rows * r).reshape(rows, r)

    def objectives(self, genotypes: np.ndarray) -> np.ndarray:
        return self.loads(genotypes).max(axis=1)

    def random_genotypes(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return self._ids[rng.integers(len(self._ids), size=(count, self.size))]

    def validate(self, genotype) -> np.ndarray:
        return validate_placement(self.workload, self.pool, genotype)


class TourProblem:
    """Tour-length minimisation; genotypes are permutations of the cities."""

    def __init__(self, inst: TspInstance):
        self.inst = inst

    @property
    def size(self) -> int:
        return self.inst.n

    def objective(self, genotype: np.ndarray) -> float:
        return self.inst.tour_length(genotype)

    def objectives(self, genotypes: np.ndarray) -> np.ndarray:
        d = self.inst.dist
        return d[genotypes, np.roll(genotypes, -1, axis=1)].sum(axis=1)

    def random_genotypes(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return np.array([rng.permutation(self.inst.n) for _ in range(count)]).reshape(count, self.inst.n)

    def validate(self, genotype) -> np.ndarray:
        g = np.asarray(genotype, dtype=np.int64)
        if sorted(g.tolist()) != list(range(self.inst.n)):
            raise ValueError("tour must be a permutation of the cities")
        return g


@dataclass
class Antibody:
    genotype: np.ndarray
    affinity: Optional[float] = None  # None until evaluated
    age: int = 0


class Population:
    """A set of antibodies; affinity is NaN while stale."""

    __slots__ = ("genotypes", "affinity", "age")

    def __init__(self, genotypes: np.ndarray, affinity: np.ndarray = None, age: np.ndarray = None):
        genotypes = np.asarray(genotypes, dtype=np.int64)
        if genotypes.ndim != 2:
            raise ValueError("genotypes must be a 2-D array (one row per antibody)")
        k = len(genotypes)
        self.genotypes = genotypes
        self.affinity = np.full(k, np.nan) if affinity is None else np.asarray(affinity, dtype=float)
        self.age = np.zeros(k, dtype=np.int64) if age is None else np.asarray(age, dtype=np.int64)

    @classmethod
    def _raw(cls, genotypes, affinity, age) -> "Population":
        pop = object.__new__(cls)
        pop.genotypes, pop.affinity, pop.age = genotypes, affinity, age
        return pop

    @classmethod
    def from_antibodies(cls, antibodies: Sequence[Antibody]) -> "Population":
        return cls(
            np.array([ab.genotype for ab in antibodies]),
            np.array([np.nan if ab.affinity is None else ab.affinity for ab in antibodies], dtype=float),
            np.array([ab.age for ab in antibodies], dtype=np.int64),
        )

    def __len__(self):
        return len(self.genotypes)

    def __getitem__(self, k) -> Antibody:
        aff = self.affinity[k]
        return Antibody(self.genotypes[k].copy(), None if np.isnan(aff) else float(aff), int(self.age[k]))

    def __iter__(self):
        return (self[k] for k in range(len(self)))

    def copy(self) -> "Population":
        return Population._raw(self.genotypes.copy(), self.affinity.copy(), self.age.copy())

    def take(self, idx) -> "Population":
        """Rows selected by an index array or boolean mask (always a copy)."""
        return Population._raw(self.genotypes[idx], self.affinity[idx], self.age[idx])

    def concat(self, other: "Population") -> "Population":
        return Population._raw(np.concatenate([self.genotypes, other.genotypes]),
                               np.concatenate([self.affinity, other.affinity]),
                               np.concatenate([self.age, other.age]))

    def best_index(self) -> int:
        """Highest affinity; the earliest row wins ties."""
        return int(np.argmax(self.affinity))


def initialize_pop(problem, params: CsaParams, rng: np.random.Generator) -> Population:
    return Population(problem.random_genotypes(params.pop_size, rng))


def evaluate(pop: Population, problem) -> Population:
    """Set every stale affinity to 1 / objective; genotypes are not touched."""
    stale = np.isnan(pop.affinity)
    if stale.any():
        pop.affinity[stale] = 1.0 / problem.objectives(pop.genotypes[stale])
    return pop


def cloning(pop: Population, params: CsaParams) -> Population:
    """clone_factor exact copies of every antibody (age included), grouped by parent."""
    return pop.take(np.repeat(np.arange(len(pop)), params.clone_factor))


def reverse_segment(genotype: np.ndarray, i: int, j: int) -> np.ndarray:
    """Reverse positions i..j (inclusive) in place."""
    if i > j:
        i, j = j, i
    genotype[i:j + 1] = genotype[i:j + 1][::-1].copy()
    return genotype


def reverse_segments(genotypes: np.ndarray, starts: np.ndarray, ends: np.ndarray) -> np.ndarray:
    """Row-wise `reverse_segment` with inclusive bounds starts[r] <= ends[r]; returns a new matrix."""
    pos = np.arange(genotypes.shape[1])[None, :]
    lo, hi = starts[:, None], ends[:, None]
    idx = np.where((pos >= lo) & (pos <= hi), lo + hi - pos, pos)
    return genotypes[np.arange(len(genotypes))[:, None], idx]


def hypermutation(clones: Population, params: CsaParams, rng: np.random.Generator) -> Population:
    """Each clone, with probability mutation_rate, gets one segment reversed.

    Draws are taken up front in clone order: one coin per clone, then a pair
    of endpoints per clone (used only if its coin succeeded).
    """
    k = len(clones)
    if k == 0:
        return clones
    coins = rng.random(k)
    ends = np.sort(rng.integers(clones.genotypes.shape[1], size=(k, 2)), axis=1)
    hit = coins < params.mutation_rate
    if hit.any():
        clones.genotypes[hit] = reverse_segments(clones.genotypes[hit], ends[hit, 0], ends[hit, 1])
        clones.affinity[hit] = np.nan
    return clones


def aging(parents: Population, mutated_clones: Population, params: CsaParams) -> tuple[Population, Population]:
    """Age everyone by one generation, reset the overall best to age 0, drop age > t_beta."""
    parents.age += 1
    mutated_clones.age += 1
    if len(parents) + len(mutated_clones):
        best = parents.concat(mutated_clones).best_index()
        if best < len(parents):
            parents.age[best] = 0
        else:
            mutated_clones.age[best - len(parents)] = 0
    keep = lambda pop: pop.take(pop.age <= params.t_beta)
    return keep(parents), keep(mutated_clones)


def selection(aged_parents: Population, aged_clones: Population, problem, params: CsaParams,
              rng: np.random.Generator) -> Population:
    """Keep the pop_size best, swap the replace_count worst survivors for fresh random antibodies."""
    union = aged_parents.concat(aged_clones)
    order = np.argsort(-union.affinity, kind="stable")[:params.pop_size]
    drop = min(params.replace_count, max(len(order) - 1, 0))
    survivors = union.take(order[:len(order) - drop])
    fresh = Population(problem.random_genotypes(params.pop_size - len(survivors), rng))
    return survivors.concat(evaluate(fresh, problem))


@dataclass
class CsaResult:
    best: Antibody
    trace: list[float]  # best affinity in the population after each generation
    population: Population


def run_csa(problem, params: CsaParams, rng: np.random.Generator,
            seed_population: Optional[Sequence] = None) -> CsaResult:
    if seed_population is None:
        pop = initialize_pop(problem, params, rng)
    else:
        rows = np.array([problem.validate(g) for g in seed_population], dtype=np.int64)
        rows = rows.reshape(len(seed_population), problem.size)
        missing = max(params.pop_size - len(rows), 0)
        pop = Population(np.concatenate([rows, problem.random_genotypes(missing, rng)]))
    evaluate(pop, problem)
    best = pop[pop.best_index()]
    trace = []
    for _ in range(params.generations):
        evaluate(pop, problem)
        clones = hypermutation(cloning(pop, params), params, rng)
        evaluate(clones, problem)
        parents, clones = aging(pop, clones, params)
        pop = selection(parents, clones, problem, params, rng)
        cand = pop.best_index()
        if pop.affinity[cand] > best.affinity:
            best = pop[cand]
        trace.append(float(pop.affinity[cand]))
    return CsaResult(best, trace, pop)
