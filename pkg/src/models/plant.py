"""
Data models for the inverter plant: physical parameters, load parameters,
switching state and the full continuous state vector.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np

from errors import ParameterError
from models.signals import ThreePhase

# Index layout of the packed plant state vector
I_L = slice(0, 3)
U_C = slice(3, 6)
I_LIN = slice(6, 9)
I_DC = 9
U_DC = 10
STATE_SIZE = 11


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ParameterError(message)


@dataclass(frozen=True)
class PlantParams:
    """LC filter and inverter parameters."""
    L_s: float = 2.4e-3
    R_s: float = 0.1
    C_s: float = 15e-6
    u_bat: float = 700.0
    f_s: float = 10e3
    omega: float = 100.0 * math.pi

    def __post_init__(self):
        _require(self.L_s > 0, f"L_s must be positive, got {self.L_s}")
        _require(self.C_s > 0, f"C_s must be positive, got {self.C_s}")
        _require(self.R_s >= 0, f"R_s must be non-negative, got {self.R_s}")
        _require(self.u_bat > 0, f"u_bat must be positive, got {self.u_bat}")
        _require(self.f_s > 0, f"f_s must be positive, got {self.f_s}")

    def scaled(self, factor: float) -> "PlantParams":
        """Return a copy with L_s and R_s multiplied by ``factor``."""
        return replace(self, L_s=self.L_s * factor, R_s=self.R_s * factor)


@dataclass(frozen=True)
class LinearLoadParams:
    """Per-phase series R-L load at bus 1."""
    R_l: float = 9.0
    L_l: float = 3e-3

    def __post_init__(self):
        _require(self.R_l > 0, f"R_l must be positive, got {self.R_l}")
        _require(self.L_l >= 0, f"L_l must be non-negative, got {self.L_l}")


@dataclass(frozen=True)
class NonlinearLoadParams:
    """Diode bridge feeding a dc-side L-C-R load.

    With ``precharge`` the dc link is charged to the bridge peak when the load connects.
    """
    L_n: float = 1.8e-3
    C_n: float = 2.2e-3
    R_n: float = 460.0
    u_f: float = 0.8
    precharge: bool = True

    def __post_init__(self):
        _require(self.L_n > 0, f"L_n must be positive, got {self.L_n}")
        _require(self.C_n > 0, f"C_n must be positive, got {self.C_n}")
        _require(self.R_n > 0, f"R_n must be positive, got {self.R_n}")
        _require(self.u_f >= 0, f"u_f must be non-negative, got {self.u_f}")


@dataclass(frozen=True)
class SwitchState:
    """Upper-switch status per inverter leg (1 = upper on)."""
    ss_a: int
    ss_b: int
    ss_c: int

    def __post_init__(self):
        for value in (self.ss_a, self.ss_b, self.ss_c):
            _require(value in (0, 1), f"switch state must be 0 or 1, got {value}")

    def __iter__(self):
        return iter((self.ss_a, self.ss_b, self.ss_c))


@dataclass
class Topology:
    """Which loads are connected at bus 1."""
    linear: bool = True
    nonlinear: bool = False


@dataclass
class PlantState:
    """All continuous plant states."""
    i_L: ThreePhase = field(default_factory=ThreePhase.zero)
    u_C: ThreePhase = field(default_factory=ThreePhase.zero)
    i_lin: ThreePhase = field(default_factory=ThreePhase.zero)
    i_dc: float = 0.0
    u_dc: float = 0.0
    t: float = 0.0

    def to_array(self) -> np.ndarray:
        x = np.zeros(STATE_SIZE)
        x[I_L] = self.i_L.to_array()
        x[U_C] = self.u_C.to_array()
        x[I_LIN] = self.i_lin.to_array()
        x[I_DC] = self.i_dc
        x[U_DC] = self.u_dc
        return x

    @classmethod
    def from_array(cls, x: np.ndarray, t: float = 0.0) -> "PlantState":
        return cls(
            i_L=ThreePhase.from_array(x[I_L]),
            u_C=ThreePhase.from_array(x[U_C]),
            i_lin=ThreePhase.from_array(x[I_LIN]),
            i_dc=float(x[I_DC]),
            u_dc=float(x[U_DC]),
            t=t,
        )

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.to_array()))) and math.isfinite(self.t)

    def stored_energy(self, params: PlantParams, linear: LinearLoadParams,
                      nonlinear: NonlinearLoadParams) -> float:
        """Total energy held in every inductor and capacitor (J)."""
        energy = 0.5 * params.L_s * sum(i * i for i in self.i_L)
        energy += 0.5 * params.C_s * sum(u * u for u in self.u_C)
        energy += 0.5 * linear.L_l * sum(i * i for i in self.i_lin)
        energy += 0.5 * nonlinear.L_n * self.i_dc ** 2
        energy += 0.5 * nonlinear.C_n * self.u_dc ** 2
        return energy
