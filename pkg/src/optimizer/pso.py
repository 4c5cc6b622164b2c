"""
Particle swarm optimization over the gain box.
"""

import time

import numpy as np
import structlog

from models.report import OptimizationReport, PsoConfig, SearchSpace
from optimizer.base import DEFAULT_PENALTY, BatchEvaluator, CostFunction, build_report

logger = structlog.get_logger(__name__)


def pso_minimize(cost: CostFunction, space: SearchSpace, cfg: PsoConfig, workers: int = 1,
                 penalty: float = DEFAULT_PENALTY, log_evaluations: bool = False) -> OptimizationReport:
    """
    Global-best PSO with linearly decreasing inertia.

    Positions start uniformly in the box with zero velocity. Each iteration
    evaluates the whole swarm, updates personal and global bests, then moves
    every particle with fresh per-dimension r_1, r_2 draws. Positions leaving
    the box are clamped and the offending velocity components zeroed.

    Args:
        cost: Maps a position vector to a cost
        space: Search box
        cfg: Swarm settings and seed
        workers: Processes used to evaluate one iteration's swarm

    Returns:
        OptimizationReport with one curve entry per iteration
    """
    started = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    lower, upper = space.lower_array, space.upper_array

    positions = space.sample(rng, cfg.swarm_size)
    velocities = np.zeros_like(positions)
    p_best = positions.copy()
    p_cost = np.full(cfg.swarm_size, np.inf)
    g_best = positions[0].copy()
    g_cost = np.inf
    curve = []

    with BatchEvaluator(cost, workers, penalty, log_evaluations) as evaluator:
        for iteration in range(1, cfg.max_iterations + 1):
            costs = evaluator.evaluate(positions)

            improved = costs < p_cost
            p_best[improved] = positions[improved]
            p_cost[improved] = costs[improved]

            leader = int(np.argmin(p_cost))
            if p_cost[leader] < g_cost:
                g_cost = float(p_cost[leader])
                g_best = p_best[leader].copy()
            curve.append(g_cost)
            logger.debug("pso_iteration", iteration=iteration, best_cost=g_cost)

            if iteration == cfg.max_iterations:
                break

            w = cfg.inertia(iteration)
            r_1 = rng.random(positions.shape)
            r_2 = rng.random(positions.shape)
            velocities = (w * velocities
                          + cfg.c_1 * r_1 * (p_best - positions)
                          + cfg.c_2 * r_2 * (g_best - positions))
            moved = positions + velocities
            clamped = (moved < lower) | (moved > upper)
            positions = np.clip(moved, lower, upper)
            velocities[clamped] = 0.0

        return build_report("pso", space, g_best, g_cost, curve, evaluator, started, cfg.seed)
