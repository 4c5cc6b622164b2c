"""
Offline gain tuners: particle swarm, genetic algorithm and simulated
annealing behind one report shape, plus campaign aggregation.
"""

from .base import BatchEvaluator, convergence_iteration, convergence_speedup
from .campaign import OPTIMIZERS, campaign_seeds, run_campaign
from .ga import ga_minimize
from .pso import pso_minimize
from .sa import sa_minimize

__all__ = [
    "BatchEvaluator", "convergence_iteration", "convergence_speedup",
    "OPTIMIZERS", "campaign_seeds", "run_campaign",
    "ga_minimize", "pso_minimize", "sa_minimize",
]
