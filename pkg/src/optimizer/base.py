"""
Shared optimizer plumbing: batch cost evaluation, report assembly and
convergence statistics.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
import structlog

from errors import ParameterError
from models.report import OptimizationReport, SearchSpace

logger = structlog.get_logger(__name__)

CostFunction = Callable[[np.ndarray], float]
DEFAULT_PENALTY = 1e6


class BatchEvaluator:
    """
    Evaluates one iteration's candidates, serially or on a process pool.

    Results come back in candidate order and non-finite costs are replaced
    by the penalty, so the outcome never depends on ``workers``.
    """

    def __init__(self, cost: CostFunction, workers: int = 1, penalty: float = DEFAULT_PENALTY,
                 log_evaluations: bool = False):
        if workers < 1:
            raise ParameterError(f"workers must be at least 1, got {workers}")
        self.cost = cost
        self.workers = workers
        self.penalty = penalty
        self.evaluations = 0
        self.log: Optional[List[float]] = [] if log_evaluations else None
        self._pool: Optional[ProcessPoolExecutor] = None

    def __enter__(self) -> "BatchEvaluator":
        if self.workers > 1:
            self._pool = ProcessPoolExecutor(max_workers=self.workers)
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def close(self) -> None:
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def evaluate(self, candidates: np.ndarray) -> np.ndarray:
        """Cost of every row of ``candidates``."""
        candidates = np.atleast_2d(np.asarray(candidates, dtype=float))
        rows = [row.copy() for row in candidates]
        if self._pool is not None and len(rows) > 1:
            raw = list(self._pool.map(self.cost, rows))
        else:
            raw = [self.cost(row) for row in rows]

        costs = np.array([c if math.isfinite(c) else self.penalty for c in map(float, raw)])
        self.evaluations += len(costs)
        if self.log is not None:
            self.log.extend(costs.tolist())
        return costs


def build_report(method: str, space: SearchSpace, best_x: np.ndarray, best_cost: float,
                 curve: Sequence[float], evaluator: BatchEvaluator, started: float,
                 seed: int) -> OptimizationReport:
    report = OptimizationReport(
        method=method,
        best_x=tuple(float(v) for v in best_x),
        best_cost=float(best_cost),
        curve=[float(c) for c in curve],
        evaluations=evaluator.evaluations,
        wall_time=time.perf_counter() - started,
        seed=seed,
        evaluation_log=evaluator.log,
        names=space.names,
    )
    logger.info("optimizer_finished", method=method, seed=seed, best_cost=report.best_cost,
                evaluations=report.evaluations, wall_time=round(report.wall_time, 3))
    return report


def convergence_iteration(report: Union[OptimizationReport, Sequence[float]],
                          threshold: float) -> Optional[int]:
    """First 1-based iteration whose best-so-far cost is at or below ``threshold``."""
    if not threshold > 0:
        raise ParameterError(f"threshold must be positive, got {threshold}")
    curve = report.curve if isinstance(report, OptimizationReport) else report
    for iteration, cost in enumerate(curve, start=1):
        if cost <= threshold:
            return iteration
    return None


def convergence_speedup(fast: Optional[float], slow: Optional[float]) -> Optional[float]:
    """Percentage fewer iterations ``fast`` needed compared with ``slow``."""
    if fast is None or slow is None or slow <= 0:
        return None
    return (slow - fast) / slow * 100.0
