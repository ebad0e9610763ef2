"""Genetic algorithm for multi-beam RIS phase synthesis.

Maximizes the minimum PDAF over a set of departure angles for one arrival
angle.  One generation is: fitness-proportional selection of 2J parents,
J weighted-sum crossovers, Gaussian mutation, then the best-ever individual
replaces one random offspring.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .radio import ArrayGeometry, aligned_profile, pdaf, wrap_phase

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 40
    generations: int = 100
    mutation_scale: float = 0.5
    mutation_final: float = 0.01
    rng_seed: int = 0
    warm_start: bool = True
    patience: int | None = None  # early stop after this many generations without improvement

    def __post_init__(self):
        if self.population_size < 4 or self.population_size % 2:
            raise ValueError("population_size must be even and >= 4")
        if self.generations < 1:
            raise ValueError("generations must be >= 1")
        if not self.mutation_scale > 0 or self.mutation_final < 0:
            raise ValueError("mutation scales must be positive")


@dataclass(frozen=True)
class BeamTask:
    geometry: ArrayGeometry
    aoa: float
    targets: tuple[float, ...]
    min_separation: float = 1e-3

    def __post_init__(self):
        targets = tuple(float(t) for t in self.targets)
        if not targets:
            raise ValueError("a beam task needs at least one target angle")
        s = np.sort(targets)
        if len(s) > 1 and np.min(np.diff(s)) < self.min_separation:
            raise ValueError("target angles must be pairwise distinct")
        object.__setattr__(self, "targets", targets)


@dataclass
class GaOutcome:
    best_profile: np.ndarray
    best_fitness: float
    fitness_history: list[float] = field(default_factory=list)
    initial_best: float = 0.0


def fitness(profile, task: BeamTask):
    """Minimum PDAF over the task's targets; vectorized over a leading population axis."""
    if len(task.targets) == 0:
        raise ValueError("empty target set")
    values = pdaf(task.geometry, profile, task.aoa, np.asarray(task.targets))
    return np.min(values, axis=-1)


def select_parents(population: np.ndarray, fitnesses, rng: np.random.Generator) -> np.ndarray:
    """Draw len(population) individuals with probability proportional to fitness."""
    f = np.asarray(fitnesses, dtype=float)
    if np.any(f < 0):
        raise ValueError("fitness values must be nonnegative")
    total = f.sum()
    if total > 0:
        prob = f / total
    else:
        log.warning("all fitness values are zero; selecting parents uniformly")
        prob = np.full(len(f), 1.0 / len(f))
    idx = rng.choice(len(f), size=len(population), replace=True, p=prob)
    return population[idx]


def crossover(parent_a, parent_b, rng: np.random.Generator, weight: float | None = None):
    """Complementary convex combinations of two parents, wrapped to [0, 2pi)."""
    a = np.asarray(parent_a, dtype=float)
    b = np.asarray(parent_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError("parents must have equal length")
    u = rng.uniform() if weight is None else weight
    return wrap_phase(u * a + (1 - u) * b), wrap_phase((1 - u) * a + u * b)


def mutate(profile, scale: float, rng: np.random.Generator) -> np.ndarray:
    profile = np.asarray(profile, dtype=float)
    return wrap_phase(profile + rng.normal(0.0, scale, size=profile.shape))


def _mutation_schedule(cfg: GaConfig, c: int) -> float:
    if cfg.generations == 1:
        return cfg.mutation_scale
    t = (c - 1) / (cfg.generations - 1)
    return cfg.mutation_scale + t * (cfg.mutation_final - cfg.mutation_scale)


def initial_population(task: BeamTask, cfg: GaConfig, rng: np.random.Generator) -> np.ndarray:
    pop = rng.uniform(0.0, 2 * np.pi, size=(cfg.population_size, task.geometry.elements))
    if cfg.warm_start:
        pop[0] = aligned_profile(task.geometry, task.aoa, task.targets[0])
    return wrap_phase(pop)


def run_ga(task: BeamTask, config: GaConfig | None = None) -> GaOutcome:
    cfg = config or GaConfig()
    rng = np.random.default_rng(cfg.rng_seed)
    pop = initial_population(task, cfg, rng)
    fit = fitness(pop, task)

    best_i = int(np.argmax(fit))
    best, best_fit = pop[best_i].copy(), float(fit[best_i])
    outcome = GaOutcome(best, best_fit, [], best_fit)
    stale = 0
    J = cfg.population_size // 2

    for c in range(1, cfg.generations + 1):
        parents = select_parents(pop, fit, rng)
        children = np.empty_like(pop)
        for j in range(J):
            children[2 * j], children[2 * j + 1] = crossover(parents[2 * j], parents[2 * j + 1], rng)
        pop = mutate(children, _mutation_schedule(cfg, c), rng)
        pop[rng.integers(cfg.population_size)] = best
        fit = fitness(pop, task)

        i = int(np.argmax(fit))
        if fit[i] > best_fit:
            best, best_fit = pop[i].copy(), float(fit[i])
            stale = 0
        else:
            stale += 1
        outcome.fitness_history.append(best_fit)
        if cfg.patience is not None and stale >= cfg.patience:
            break

    outcome.best_profile, outcome.best_fitness = best, best_fit
    return outcome
