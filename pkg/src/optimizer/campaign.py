"""
Repeated optimizer runs with distinct seeds.
"""

from typing import Callable, Dict, List, Optional, Sequence

import structlog

from errors import ConfigurationError
from models.report import CampaignResult, OptimizationReport, SearchSpace
from optimizer.base import DEFAULT_PENALTY, CostFunction
from optimizer.ga import ga_minimize
from optimizer.pso import pso_minimize
from optimizer.sa import sa_minimize

logger = structlog.get_logger(__name__)

OPTIMIZERS: Dict[str, Callable[..., OptimizationReport]] = {
    "pso": pso_minimize,
    "ga": ga_minimize,
    "sa": sa_minimize,
}


def campaign_seeds(base_seed: int, repetitions: int) -> List[int]:
    """Consecutive seeds starting at ``base_seed``."""
    if repetitions < 1:
        raise ConfigurationError(f"repetitions must be at least 1, got {repetitions}")
    return [base_seed + i for i in range(repetitions)]


def optimizer_config(method: str, settings, seed: int):
    """Per-seed optimizer configuration taken from the loaded settings."""
    if method == "pso":
        return settings.pso_config(seed)
    if method == "ga":
        return settings.ga_config(seed)
    if method == "sa":
        return settings.sa_config(seed)
    raise ConfigurationError(f"unknown optimizer {method!r}; choose from {sorted(OPTIMIZERS)}")


def run_campaign(method: str, cost: CostFunction, space: SearchSpace, seeds: Sequence[int],
                 settings, workers: int = 1, penalty: float = DEFAULT_PENALTY,
                 log_evaluations: bool = False,
                 on_report: Optional[Callable[[OptimizationReport], None]] = None) -> CampaignResult:
    """
    Run ``method`` once per seed and aggregate the best costs.

    Args:
        method: "pso", "ga" or "sa"
        cost: Cost function shared by every run
        space: Search box
        seeds: One seed per repetition
        settings: Source of the per-seed optimizer configurations
        workers: Processes used for intra-iteration cost evaluation
        on_report: Called with each finished run, in seed order

    Returns:
        CampaignResult holding every run's report
    """
    if method not in OPTIMIZERS:
        raise ConfigurationError(f"unknown optimizer {method!r}; choose from {sorted(OPTIMIZERS)}")
    if not seeds:
        raise ConfigurationError("a campaign needs at least one seed")

    minimize = OPTIMIZERS[method]
    reports = []
    for run, seed in enumerate(seeds, start=1):
        logger.info("campaign_run_started", method=method, run=run, of=len(seeds), seed=seed)
        report = minimize(cost, space, optimizer_config(method, settings, seed),
                          workers=workers, penalty=penalty, log_evaluations=log_evaluations)
        reports.append(report)
        if on_report is not None:
            on_report(report)

    result = CampaignResult(method=method, reports=reports)
    logger.info("campaign_finished", **result.summary())
    return result
