"""
Switching inverter plant: two-level bridge, carrier PWM, LC filter, series RL
load and a diode-bridge rectifier feeding an L-C-R dc link, all at bus 1.

The module-level functions are the single-step building blocks; ``InverterPlant``
is the mutable instance the scenario engine drives one controller tick at a time.
"""

import math
from dataclasses import replace
from typing import Tuple

import numpy as np
import structlog

from errors import ParameterError, SimulationDivergedError
from models.plant import (I_DC, I_L, I_LIN, U_C, U_DC, LinearLoadParams, NonlinearLoadParams,
                          PlantParams, PlantState, SwitchState, Topology)
from models.scenario import EventKind, ScenarioEvent
from models.signals import ThreePhase
from simulator import kernels

logger = structlog.get_logger(__name__)

MAX_DT = 2e-6


def inverter_voltages(ss: SwitchState, u_bat: float) -> ThreePhase:
    """Phase voltages produced by a switch state."""
    return ThreePhase(*kernels.inverter_phase_voltages(
        float(ss.ss_a), float(ss.ss_b), float(ss.ss_c), float(u_bat)))


def pwm_modulate(u_ref_abc: ThreePhase, u_bat: float, carrier_phase: float) -> SwitchState:
    """Compare each normalized phase reference against the shared triangular carrier."""
    if not 0.0 <= carrier_phase < 1.0:
        raise ParameterError(f"carrier_phase must lie in [0, 1), got {carrier_phase}")
    c = kernels.carrier_value(carrier_phase)
    return SwitchState(*(int(kernels.pwm_switch(float(u), float(u_bat), c)) for u in u_ref_abc))


def rectifier_conduction(u_C: ThreePhase, i_dc: float, u_dc: float,
                         p: NonlinearLoadParams) -> Tuple[float, ThreePhase]:
    """Bridge output voltage and the ac-side phase currents of the diode rectifier."""
    i_max, i_min = kernels.conduction_pair(u_C.a, u_C.b, u_C.c)
    phases = (u_C.a, u_C.b, u_C.c)
    bridge_voltage = phases[i_max] - phases[i_min] - 2.0 * p.u_f

    if i_dc <= 0.0 or i_max == i_min:
        return bridge_voltage, ThreePhase.zero()

    currents = [0.0, 0.0, 0.0]
    currents[i_max] = i_dc
    currents[i_min] = -i_dc
    return bridge_voltage, ThreePhase(*currents)


def _kernel_args(params: PlantParams, topology: Topology, linear: LinearLoadParams,
                 nonlinear: NonlinearLoadParams):
    return (float(params.L_s), float(params.R_s), float(params.C_s),
            bool(topology.linear), float(linear.R_l), float(linear.L_l),
            bool(topology.nonlinear), float(nonlinear.L_n), float(nonlinear.C_n),
            float(nonlinear.R_n), float(nonlinear.u_f))


def plant_derivatives(s: PlantState, u_inv: ThreePhase, topology: Topology, params: PlantParams,
                      linear: LinearLoadParams, nonlinear: NonlinearLoadParams) -> PlantState:
    """Time derivative of every state, packed as a PlantState (its ``t`` field is dt/dt = 1)."""
    x = s.to_array()
    out = np.zeros_like(x)
    i_load = np.zeros(3)
    i_max, i_min = kernels.conduction_pair(x[3], x[4], x[5])
    bridge = x[3 + i_max] - x[3 + i_min] - 2.0 * nonlinear.u_f
    conducting = bool(topology.nonlinear and (x[I_DC] > 0.0 or bridge > x[U_DC]))
    kernels.derivatives(x, out, i_load, float(u_inv.a), float(u_inv.b), float(u_inv.c),
                        *_kernel_args(params, topology, linear, nonlinear),
                        i_max, i_min, conducting)
    return PlantState.from_array(out, t=1.0)


def step(s: PlantState, u_inv: ThreePhase, dt: float, topology: Topology, params: PlantParams,
         linear: LinearLoadParams, nonlinear: NonlinearLoadParams) -> PlantState:
    """Advance by one RK4 step of length ``dt`` with the given inverter voltages."""
    if not 0.0 < dt <= MAX_DT:
        raise ParameterError(f"dt must lie in (0, {MAX_DT}], got {dt}")
    x = s.to_array()
    kernels.rk4_step(x, float(dt), float(u_inv.a), float(u_inv.b), float(u_inv.c),
                     *_kernel_args(params, topology, linear, nonlinear), *kernels.workspace())
    t = s.t + dt
    if not np.all(np.isfinite(x)):
        raise SimulationDivergedError(t)
    return PlantState.from_array(x, t=t)


class InverterPlant:
    """
    Mutable plant instance advanced in PWM-modulated micro-steps.

    Time is kept as an integer micro-step counter so carrier phase and event
    placement are exact for any horizon.
    """

    def __init__(self, params: PlantParams, linear: LinearLoadParams,
                 nonlinear: NonlinearLoadParams, topology: Topology,
                 dt: float = 1e-6, state: PlantState = None):
        if not 0.0 < dt <= MAX_DT:
            raise ParameterError(f"dt must lie in (0, {MAX_DT}], got {dt}")
        self.params = params
        self.linear = linear
        self.nonlinear = nonlinear
        self.topology = Topology(topology.linear, topology.nonlinear)
        self.dt = dt
        self.step_index = 0
        self._x = (state or PlantState()).to_array()

    @property
    def t(self) -> float:
        return self.step_index * self.dt

    @property
    def state(self) -> PlantState:
        return PlantState.from_array(self._x, t=self.t)

    def measure(self) -> Tuple[ThreePhase, ThreePhase, ThreePhase]:
        """Sample inductor currents, capacitor voltages and the bus-1 load current."""
        x = self._x
        i_L = ThreePhase(x[0], x[1], x[2])
        u_C = ThreePhase(x[3], x[4], x[5])

        i_0 = [0.0, 0.0, 0.0]
        if self.topology.linear:
            if self.linear.L_l > 0.0:
                i_0 = [x[6], x[7], x[8]]
            else:
                i_0 = [x[3 + p] / self.linear.R_l for p in range(3)]
        if self.topology.nonlinear:
            _, i_ac = rectifier_conduction(u_C, x[I_DC], x[U_DC], self.nonlinear)
            i_0 = [a + b for a, b in zip(i_0, i_ac)]
        return i_L, u_C, ThreePhase(*i_0)

    def advance(self, u_ref_abc: ThreePhase, n_steps: int) -> np.ndarray:
        """
        Hold ``u_ref_abc`` at the modulator for ``n_steps`` micro-steps.

        Returns the per-phase high-side on-counts over the interval.
        Raises SimulationDivergedError when a state becomes non-finite.
        """
        duty = np.zeros(3)
        if n_steps <= 0:
            return duty
        done = kernels.advance(
            self._x, self.step_index, int(n_steps), float(self.dt),
            float(u_ref_abc.a), float(u_ref_abc.b), float(u_ref_abc.c),
            float(self.params.u_bat), float(self.params.f_s),
            *_kernel_args(self.params, self.topology, self.linear, self.nonlinear),
            duty,
        )
        self.step_index += done
        if done < n_steps:
            self.step_index += 1
            logger.debug("plant_diverged", t=self.t)
            raise SimulationDivergedError(self.t)
        return duty

    def apply_event(self, event: ScenarioEvent) -> None:
        """Mutate topology or parameters; controller-side events are ignored here."""
        kind = event.kind
        if kind is EventKind.CONNECT_LINEAR:
            self.topology.linear = True
        elif kind is EventKind.DISCONNECT_LINEAR:
            self.topology.linear = False
            self._x[I_LIN] = 0.0
        elif kind is EventKind.SCALE_LINEAR:
            self.linear = replace(self.linear, R_l=self.linear.R_l * event.factor)
        elif kind is EventKind.CONNECT_NONLINEAR:
            self.topology.nonlinear = True
            if self.nonlinear.precharge:
                self._precharge_dc_link()
        elif kind is EventKind.DISCONNECT_NONLINEAR:
            self.topology.nonlinear = False
            self._x[I_DC] = 0.0
        elif kind is EventKind.SCALE_PLANT:
            self.params = self.params.scaled(event.factor)
        else:
            return
        logger.debug("plant_event", kind=kind.value, t=self.t, factor=event.factor)

    def _precharge_dc_link(self) -> None:
        """Raise u_dc to the present line-to-line peak less the diode drops; never lower it."""
        u_C = self._x[U_C]
        peak = math.sqrt(2.0 * float(np.dot(u_C, u_C))) - 2.0 * self.nonlinear.u_f
        if peak > self._x[U_DC]:
            self._x[U_DC] = peak
            self._x[I_DC] = 0.0

    def kcl_residuals(self) -> Tuple[float, float]:
        """Sums of the three inductor currents and of the three linear-load currents."""
        return float(np.sum(self._x[I_L])), float(np.sum(self._x[I_LIN]))

    def snapshot(self) -> np.ndarray:
        return self._x.copy()

    def stored_energy(self) -> float:
        return self.state.stored_energy(self.params, self.linear, self.nonlinear)
