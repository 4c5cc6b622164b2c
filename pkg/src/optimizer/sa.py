"""
Single-chain simulated annealing with geometric cooling.
"""

import math
import time

import numpy as np
import structlog

from models.report import OptimizationReport, SaConfig, SearchSpace
from optimizer.base import DEFAULT_PENALTY, BatchEvaluator, CostFunction, build_report

logger = structlog.get_logger(__name__)


def metropolis_probability(delta: float, temperature: float) -> float:
    """Acceptance probability of a move that changes the cost by ``delta``."""
    if delta <= 0 or math.isinf(temperature):
        return 1.0
    return math.exp(-delta / temperature)


def sa_minimize(cost: CostFunction, space: SearchSpace, cfg: SaConfig, workers: int = 1,
                penalty: float = DEFAULT_PENALTY, log_evaluations: bool = False) -> OptimizationReport:
    """
    Gaussian neighbour proposals scaled to the box, Metropolis acceptance and
    one temperature level per reported iteration.

    The chain is inherently sequential, so proposals are always evaluated
    one at a time and ``workers`` is accepted only for interface parity.
    The start point costs one extra evaluation.
    """
    started = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    sigma = cfg.step_scale * space.width

    with BatchEvaluator(cost, 1, penalty, log_evaluations) as evaluator:
        current = space.sample(rng, 1)[0]
        current_cost = float(evaluator.evaluate(current)[0])
        best_x, best_cost = current.copy(), current_cost
        curve = []

        for iteration in range(1, cfg.iterations + 1):
            temperature = cfg.temperature(iteration)
            accepted = 0
            for _ in range(cfg.moves_per_temperature):
                proposal = space.clip(current + rng.normal(0.0, sigma))
                u = rng.random()
                proposal_cost = float(evaluator.evaluate(proposal)[0])
                if u < metropolis_probability(proposal_cost - current_cost, temperature):
                    current, current_cost = proposal, proposal_cost
                    accepted += 1
                    if current_cost < best_cost:
                        best_x, best_cost = current.copy(), current_cost
            curve.append(best_cost)
            logger.debug("sa_iteration", iteration=iteration, temperature=temperature,
                         accepted=accepted, best_cost=best_cost)

        return build_report("sa", space, best_x, best_cost, curve, evaluator, started, cfg.seed)
