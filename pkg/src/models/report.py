"""
Optimizer configuration and report models.
"""

import math
import statistics
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from errors import ParameterError
from models.control import GAIN_NAMES, SmcGains


@dataclass(frozen=True)
class SearchSpace:
    """Axis-aligned box over (k_cd, k_cq, k_sat)."""
    lower: Tuple[float, ...] = (1.0, 1.0, 0.001)
    upper: Tuple[float, ...] = (2000.0, 2000.0, 15.0)
    names: Tuple[str, ...] = GAIN_NAMES

    def __post_init__(self):
        if not (len(self.lower) == len(self.upper) == len(self.names)):
            raise ParameterError("lower, upper and names must have the same length")
        if any(lo >= hi for lo, hi in zip(self.lower, self.upper)):
            raise ParameterError(f"lower {self.lower} must be below upper {self.upper}")

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def lower_array(self) -> np.ndarray:
        return np.asarray(self.lower, dtype=float)

    @property
    def upper_array(self) -> np.ndarray:
        return np.asarray(self.upper, dtype=float)

    @property
    def width(self) -> np.ndarray:
        return self.upper_array - self.lower_array

    def clip(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower_array, self.upper_array)

    def contains(self, x: np.ndarray) -> bool:
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower_array) and np.all(x <= self.upper_array))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Uniform samples, one row per candidate."""
        return self.lower_array + rng.random((n, self.dim)) * self.width


@dataclass(frozen=True)
class PsoConfig:
    swarm_size: int = 50
    max_iterations: int = 45
    w_high: float = 1.1
    w_low: float = 0.1
    c_1: float = 1.49
    c_2: float = 1.49
    seed: int = 0

    def __post_init__(self):
        if self.swarm_size < 2:
            raise ParameterError("swarm_size must be at least 2")
        if self.max_iterations < 1:
            raise ParameterError("max_iterations must be at least 1")
        if not 0 < self.w_low <= self.w_high:
            raise ParameterError("inertia range must satisfy 0 < w_low <= w_high")
        if not (self.c_1 > 0 and self.c_2 > 0):
            raise ParameterError("c_1 and c_2 must be positive")

    def inertia(self, iteration: int) -> float:
        """Linearly decreasing inertia; ``iteration`` is 1-based."""
        if self.max_iterations == 1:
            return self.w_high
        fraction = (iteration - 1) / (self.max_iterations - 1)
        return self.w_high - (self.w_high - self.w_low) * fraction


@dataclass(frozen=True)
class GaConfig:
    population: int = 50
    generations: int = 45
    crossover_probability: float = 0.9
    blend_alpha: float = 0.5
    mutation_probability: float = 0.1
    mutation_scale: float = 0.05
    tournament_size: int = 3
    elitism: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.population < 2 or self.population % 2:
            raise ParameterError("population must be an even number >= 2")
        if self.generations < 1:
            raise ParameterError("generations must be at least 1")
        if not 0 <= self.crossover_probability <= 1 or not 0 <= self.mutation_probability <= 1:
            raise ParameterError("probabilities must lie in [0, 1]")
        if not 0 <= self.elitism < self.population:
            raise ParameterError("elitism must be smaller than the population")
        if self.tournament_size < 1:
            raise ParameterError("tournament_size must be at least 1")


@dataclass(frozen=True)
class SaConfig:
    initial_temperature: float = 100.0
    iterations: int = 45
    cooling_rate: float = 0.9
    moves_per_temperature: int = 50
    step_scale: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if not self.initial_temperature > 0:
            raise ParameterError("initial_temperature must be positive")
        if not 0 < self.cooling_rate <= 1:
            raise ParameterError("cooling_rate must lie in (0, 1]")
        if self.iterations < 1 or self.moves_per_temperature < 1:
            raise ParameterError("iterations and moves_per_temperature must be at least 1")

    def temperature(self, iteration: int) -> float:
        """Geometric schedule; ``iteration`` is 1-based, so the first block runs at T0."""
        return self.initial_temperature * self.cooling_rate ** (iteration - 1)


@dataclass
class OptimizationReport:
    """Result of one optimizer run."""
    method: str
    best_x: Tuple[float, ...]
    best_cost: float
    curve: List[float]
    evaluations: int
    wall_time: float
    seed: int
    evaluation_log: Optional[List[float]] = field(default=None, repr=False)
    names: Tuple[str, ...] = GAIN_NAMES

    @property
    def best_gains(self) -> SmcGains:
        return SmcGains.from_vector(self.best_x)

    @property
    def iterations(self) -> int:
        return len(self.curve)

    def is_monotone(self) -> bool:
        return all(b <= a for a, b in zip(self.curve, self.curve[1:]))

    def to_dict(self) -> Dict[str, object]:
        return {
            "method": self.method,
            "seed": self.seed,
            "best_cost": self.best_cost,
            **dict(zip(self.names, self.best_x)),
            "iterations": self.iterations,
            "evaluations": self.evaluations,
            "wall_time_s": self.wall_time,
        }


@dataclass
class CampaignResult:
    """Aggregate of repeated optimizer runs with distinct seeds."""
    method: str
    reports: List[OptimizationReport]

    @property
    def best_costs(self) -> List[float]:
        return [r.best_cost for r in self.reports]

    @property
    def mean_cost(self) -> float:
        return float(np.mean(self.best_costs))

    @property
    def std_cost(self) -> float:
        return float(np.std(self.best_costs))

    @property
    def min_cost(self) -> float:
        return float(np.min(self.best_costs))

    @property
    def max_cost(self) -> float:
        return float(np.max(self.best_costs))

    @property
    def best_report(self) -> OptimizationReport:
        return min(self.reports, key=lambda r: r.best_cost)

    def median_convergence(self, threshold: float) -> Optional[float]:
        """Median first-crossing iteration; runs that never cross count as infinite.

        Returns None when the median run never crosses the threshold.
        """
        from optimizer.base import convergence_iteration

        hits = [convergence_iteration(r, threshold) for r in self.reports]
        median = statistics.median(math.inf if h is None else h for h in hits)
        return None if math.isinf(median) else float(median)

    def summary(self) -> Dict[str, float]:
        return {
            "method": self.method,
            "runs": len(self.reports),
            "mean_cost": self.mean_cost,
            "std_cost": self.std_cost,
            "min_cost": self.min_cost,
            "max_cost": self.max_cost,
        }


def median_curve(curves: Sequence[Sequence[float]]) -> List[float]:
    """Element-wise median of equally long convergence curves."""
    return [float(v) for v in np.median(np.asarray(curves, dtype=float), axis=0)]
