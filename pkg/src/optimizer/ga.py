"""
Real-coded generational genetic algorithm with elitism.
"""

import time

import numpy as np
import structlog

from models.report import GaConfig, OptimizationReport, SearchSpace
from optimizer.base import DEFAULT_PENALTY, BatchEvaluator, CostFunction, build_report

logger = structlog.get_logger(__name__)


def _tournament(rng: np.random.Generator, costs: np.ndarray, size: int) -> int:
    entrants = rng.integers(0, len(costs), size=size)
    return int(entrants[np.argmin(costs[entrants])])


def blend_crossover(rng: np.random.Generator, a: np.ndarray, b: np.ndarray, alpha: float):
    """BLX-alpha: each child gene is uniform on the parents' interval widened by alpha on both sides."""
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    spread = alpha * (hi - lo)
    return (rng.uniform(lo - spread, hi + spread),
            rng.uniform(lo - spread, hi + spread))


def _offspring(rng: np.random.Generator, population: np.ndarray, costs: np.ndarray,
               space: SearchSpace, cfg: GaConfig) -> np.ndarray:
    n_children = cfg.population - cfg.elitism
    sigma = cfg.mutation_scale * space.width
    children = []
    while len(children) < n_children:
        a = population[_tournament(rng, costs, cfg.tournament_size)]
        b = population[_tournament(rng, costs, cfg.tournament_size)]
        if rng.random() < cfg.crossover_probability:
            pair = blend_crossover(rng, a, b, cfg.blend_alpha)
        else:
            pair = (a.copy(), b.copy())
        for child in pair:
            mutate = rng.random(space.dim) < cfg.mutation_probability
            child = child + mutate * rng.normal(0.0, sigma)
            children.append(space.clip(child))
    return np.array(children[:n_children])


def ga_minimize(cost: CostFunction, space: SearchSpace, cfg: GaConfig, workers: int = 1,
                penalty: float = DEFAULT_PENALTY, log_evaluations: bool = False) -> OptimizationReport:
    """
    Tournament selection, blend crossover, Gaussian mutation and elitist survival.

    Every generation evaluates the full population (elites included), so the
    budget is population * generations evaluations.
    """
    started = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)

    population = space.sample(rng, cfg.population)
    best_x = population[0].copy()
    best_cost = np.inf
    costs = None
    curve = []

    with BatchEvaluator(cost, workers, penalty, log_evaluations) as evaluator:
        for generation in range(1, cfg.generations + 1):
            if costs is not None:
                order = np.argsort(costs, kind="stable")
                elites = population[order[:cfg.elitism]]
                population = np.vstack([elites, _offspring(rng, population, costs, space, cfg)])
            costs = evaluator.evaluate(population)

            leader = int(np.argmin(costs))
            if costs[leader] < best_cost:
                best_cost = float(costs[leader])
                best_x = population[leader].copy()
            curve.append(best_cost)
            logger.debug("ga_generation", generation=generation, best_cost=best_cost)

        return build_report("ga", space, best_x, best_cost, curve, evaluator, started, cfg.seed)
