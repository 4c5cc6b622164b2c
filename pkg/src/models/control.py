"""
Data models for the cascaded voltage/current controller.
"""

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from errors import ParameterError
from models.signals import DqPair

GAIN_NAMES = ("k_cd", "k_cq", "k_sat")


@dataclass(frozen=True)
class VoltageLoopGains:
    """PI voltage-loop gains obtained by pole placement."""
    K_pv: float
    K_iv: float
    xi: float
    omega_v: float
    T_vres: float


@dataclass(frozen=True)
class SmcGains:
    """Reaching gains and boundary-layer width of the sliding-mode current loop."""
    k_cd: float
    k_cq: float
    k_sat: float
    k_ttd: float = 1.0
    k_ttq: float = 1.0

    def __post_init__(self):
        if not (self.k_cd > 0 and self.k_cq > 0):
            raise ParameterError(f"reaching gains must be positive, got ({self.k_cd}, {self.k_cq})")
        if not self.k_sat > 0:
            raise ParameterError(f"k_sat must be positive, got {self.k_sat}")
        if not (self.k_ttd > 0 and self.k_ttq > 0):
            raise ParameterError("k_tt scaling factors must be positive")

    def to_vector(self) -> np.ndarray:
        return np.array([self.k_cd, self.k_cq, self.k_sat], dtype=float)

    @classmethod
    def from_vector(cls, x: Sequence[float]) -> "SmcGains":
        return cls(k_cd=float(x[0]), k_cq=float(x[1]), k_sat=float(x[2]))

    def __str__(self) -> str:
        return f"k_cd={self.k_cd:.6g}, k_cq={self.k_cq:.6g}, k_sat={self.k_sat:.6g}"


@dataclass(frozen=True)
class ControllerConfig:
    """Sampling, reference and model parameters held by the controller.

    L_s, R_s and C_s are the controller's own model copies; plant
    perturbations never touch them. T_ramp is the soft-start time of the
    voltage reference (0 applies the full amplitude at once).
    """
    T_sam: float = 50e-6
    T_cres: float = 0.5e-3
    T_vres: float = 10e-3
    xi: float = 1.0
    u_amp: float = 300.0
    omega: float = 100.0 * math.pi
    L_s: float = 2.4e-3
    R_s: float = 0.1
    C_s: float = 15e-6
    integrator_limit: float = 50.0
    T_ramp: float = 10e-3
    delay_compensation: bool = True
    load_prediction: bool = True

    def __post_init__(self):
        if not self.T_sam > 0:
            raise ParameterError(f"T_sam must be positive, got {self.T_sam}")
        if not (self.L_s > 0 and self.C_s > 0 and self.R_s >= 0):
            raise ParameterError("controller model parameters out of range")
        if not self.integrator_limit > 0:
            raise ParameterError("integrator_limit must be positive")
        if self.T_ramp < 0:
            raise ParameterError(f"T_ramp must be non-negative, got {self.T_ramp}")

    def scaled(self, factor: float) -> "ControllerConfig":
        """Copy with the model inductance and resistance multiplied by ``factor``."""
        return replace(self, L_s=self.L_s * factor, R_s=self.R_s * factor)


@dataclass
class ControllerState:
    """Mutable state carried by the controller between sampling instants."""
    config: ControllerConfig = field(default_factory=ControllerConfig)
    integ_d: float = 0.0
    integ_q: float = 0.0
    prev_i_ref: DqPair = field(default_factory=DqPair.zero)
    theta: float = 0.0
    primed: bool = False
    prev_i_0: Optional[DqPair] = None

    def reset(self) -> None:
        self.integ_d = 0.0
        self.integ_q = 0.0
        self.prev_i_ref = DqPair.zero()
        self.theta = 0.0
        self.primed = False
        self.prev_i_0 = None
