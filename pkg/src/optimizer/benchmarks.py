"""
Analytic landscapes with known minima, used to check the optimizers
independently of the closed-loop cost.
"""

from typing import Optional, Sequence

import numpy as np


def sphere(x: Sequence[float], center: Optional[Sequence[float]] = None) -> float:
    """f(x) = sum((x - c)**2); minimum 0 at c."""
    x = np.asarray(x, dtype=float)
    c = np.zeros_like(x) if center is None else np.asarray(center, dtype=float)
    return float(np.sum((x - c) ** 2))


def rastrigin(x: Sequence[float], center: Optional[Sequence[float]] = None) -> float:
    """Multimodal Rastrigin function shifted to ``center``; minimum 0 at c."""
    x = np.asarray(x, dtype=float)
    c = np.zeros_like(x) if center is None else np.asarray(center, dtype=float)
    z = x - c
    A = 10.0
    return float(A * z.size + np.sum(z ** 2 - A * np.cos(2.0 * np.pi * z)))


def constant(x: Sequence[float], value: float = 1.0) -> float:
    return float(value)
