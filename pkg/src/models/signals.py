"""
Signal containers for three-phase, stationary-frame and rotating-frame quantities.
"""

from dataclasses import dataclass
from typing import Iterator

import numpy as np


@dataclass(frozen=True)
class ThreePhase:
    """Instantaneous a, b, c phase quantities (volts or amperes)."""
    a: float
    b: float
    c: float

    def __iter__(self) -> Iterator[float]:
        return iter((self.a, self.b, self.c))

    @property
    def zero_sequence(self) -> float:
        """Sum of the three phases."""
        return self.a + self.b + self.c

    def to_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c], dtype=float)

    @classmethod
    def from_array(cls, values) -> "ThreePhase":
        return cls(float(values[0]), float(values[1]), float(values[2]))

    @classmethod
    def zero(cls) -> "ThreePhase":
        return cls(0.0, 0.0, 0.0)


@dataclass(frozen=True)
class TwoAxis:
    """Stationary alpha-beta frame pair."""
    alpha: float
    beta: float

    def __iter__(self) -> Iterator[float]:
        return iter((self.alpha, self.beta))


@dataclass(frozen=True)
class DqPair:
    """Rotating dq frame pair."""
    d: float
    q: float

    def __iter__(self) -> Iterator[float]:
        return iter((self.d, self.q))

    @classmethod
    def zero(cls) -> "DqPair":
        return cls(0.0, 0.0)
