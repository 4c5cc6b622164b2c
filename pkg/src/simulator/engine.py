"""
Scenario engine - couples the sampled controller to the switching plant,
executes timed events and accumulates the IAE tracking cost.

One controller tick is T_sam long and spans T_sam/dt_sim plant micro-steps.
At tick k the engine applies every event due at or before the tick's first
micro-step, samples the plant, runs the controller, adds
(|e_d| + |e_q|)*T_sam to the running IAE and then advances the plant to the
next tick, splitting the tick at any event that falls strictly inside it.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Union

import numpy as np
import structlog

from errors import ParameterError, SimulationDivergedError
from models.control import ControllerConfig, SmcGains
from models.plant import LinearLoadParams, NonlinearLoadParams, PlantParams, Topology
from models.scenario import DUTY_COLUMNS, TRACE_COLUMNS, CostResult, EventKind, Scenario, ScenarioEvent, Trace
from simulator.control import CascadedController
from simulator.plant import InverterPlant

logger = structlog.get_logger(__name__)

DIVERGENCE_PENALTY = 1e6
_EPS = 1e-9


@dataclass(frozen=True)
class RunOptions:
    """Everything besides gains and scenario that a closed-loop run depends on."""
    plant: PlantParams = field(default_factory=PlantParams)
    nonlinear: NonlinearLoadParams = field(default_factory=NonlinearLoadParams)
    controller: ControllerConfig = field(default_factory=ControllerConfig)
    dt_sim: float = 1e-6
    penalty: float = DIVERGENCE_PENALTY
    record_trace: bool = False

    @classmethod
    def from_settings(cls, settings, record_trace: bool = False) -> "RunOptions":
        return cls(
            plant=settings.plant_params(),
            nonlinear=settings.nonlinear_params(),
            controller=settings.controller_config(),
            dt_sim=settings.run.dt_sim,
            penalty=settings.run.penalty,
            record_trace=record_trace,
        )

    def with_trace(self, record_trace: bool = True) -> "RunOptions":
        return RunOptions(self.plant, self.nonlinear, self.controller,
                          self.dt_sim, self.penalty, record_trace)


def default_scenario(linear_load: Optional[LinearLoadParams] = None) -> Scenario:
    """
    The three-phase test sequence: linear-load step at 0.1 s, swap to the
    nonlinear load at 0.2 s and a 40 % plant L_s/R_s increase at 0.5 s.
    """
    return Scenario(
        horizon=0.7,
        events=[
            ScenarioEvent(0.1, EventKind.SCALE_LINEAR, 0.5),
            ScenarioEvent(0.2, EventKind.CONNECT_NONLINEAR),
            ScenarioEvent(0.2, EventKind.DISCONNECT_LINEAR),
            ScenarioEvent(0.5, EventKind.SCALE_PLANT, 1.4),
        ],
        initial_topology=Topology(linear=True, nonlinear=False),
        linear_load=linear_load or LinearLoadParams(),
        name="default",
    )


def accumulate_iae(e_d: Sequence[float], e_q: Sequence[float], T_sam: float) -> float:
    """Rectangle-rule IAE of sampled dq errors."""
    e_d = np.asarray(e_d, dtype=float)
    e_q = np.asarray(e_q, dtype=float)
    if e_d.shape != e_q.shape:
        raise ParameterError("e_d and e_q must have the same length")
    return float(np.sum(np.abs(e_d) + np.abs(e_q)) * T_sam)


def _steps_per_tick(T_sam: float, dt: float) -> int:
    ratio = T_sam / dt
    n = int(round(ratio))
    if n < 1 or abs(ratio - n) > 1e-6:
        raise ParameterError(f"T_sam={T_sam} must be an integer multiple of dt_sim={dt}")
    return n


class _TraceRecorder:
    """Preallocated per-tick columns; truncated to the rows actually written."""

    def __init__(self, rows: int):
        self.columns = {name: np.full(rows, np.nan) for name in TRACE_COLUMNS + DUTY_COLUMNS}
        self.rows = 0

    def append(self, values: Dict[str, float]) -> None:
        for name, value in values.items():
            self.columns[name][self.rows] = value
        self.rows += 1

    def set_duty(self, duty: np.ndarray) -> None:
        row = self.rows - 1
        for name, value in zip(DUTY_COLUMNS, duty):
            self.columns[name][row] = value

    def build(self) -> Trace:
        return Trace(columns={name: col[:self.rows].copy() for name, col in self.columns.items()})


class ScenarioRunner:
    """
    Stateful closed-loop run of one scenario with fixed gains.

    ``advance`` may be called repeatedly; the plant, controller and IAE carry
    over so a run split in pieces matches a single call.
    """

    def __init__(self, gains: SmcGains, scenario: Scenario, options: RunOptions = None):
        self.options = options or RunOptions()
        self.gains = gains
        self.scenario = scenario
        dt = self.options.dt_sim
        T_sam = self.options.controller.T_sam

        self.steps_per_tick = _steps_per_tick(T_sam, dt)
        self.total_ticks = int(math.floor(scenario.horizon / T_sam + _EPS))
        self.plant = InverterPlant(self.options.plant, scenario.linear_load, self.options.nonlinear,
                                   scenario.initial_topology, dt=dt)
        self.controller = CascadedController(self.options.controller, gains)

        self._events = [(int(math.ceil(e.time / dt - _EPS)), e) for e in scenario.sorted_events()]
        self._next_event = 0
        self.tick = 0
        self.iae = 0.0
        self._recorder = _TraceRecorder(self.total_ticks + 1) if self.options.record_trace else None

    @property
    def finished(self) -> bool:
        return self.tick >= self.total_ticks

    @property
    def t(self) -> float:
        return self.plant.t

    def _apply_due_events(self, step_index: int) -> None:
        while self._next_event < len(self._events) and self._events[self._next_event][0] <= step_index:
            event = self._events[self._next_event][1]
            self.plant.apply_event(event)
            self.controller.apply_event(event)
            self._next_event += 1

    def _sample(self) -> Dict[str, float]:
        self._apply_due_events(self.plant.step_index)
        out = self.controller.update(self.plant.t, *self.plant.measure())
        return {
            "t": self.tick * self.options.controller.T_sam,
            "i_ld_ref": out.i_Lref.d,
            "i_lq_ref": out.i_Lref.q,
            "i_ld": out.i_L.d,
            "i_lq": out.i_L.q,
            "u_cd": out.u_C.d,
            "u_cq": out.u_C.q,
            "u_dref": out.u_ref.d,
            "u_qref": out.u_ref.q,
            "iae": self.iae,
            "_u_ref_abc": out.u_ref_abc,
        }

    def _advance_plant(self, u_ref_abc) -> np.ndarray:
        """Advance one tick, applying events that fall strictly inside it."""
        end = self.plant.step_index + self.steps_per_tick
        duty = np.zeros(3)
        while self.plant.step_index < end:
            stop = end
            if self._next_event < len(self._events):
                stop = min(stop, max(self._events[self._next_event][0], self.plant.step_index + 1))
            duty += self.plant.advance(u_ref_abc, stop - self.plant.step_index)
            if self.plant.step_index < end:
                self._apply_due_events(self.plant.step_index)
        return duty / self.steps_per_tick

    def advance(self, n_ticks: int) -> float:
        """
        Run up to ``n_ticks`` controller ticks (never past the horizon).

        Returns the running IAE. Raises SimulationDivergedError on a
        non-finite plant state.
        """
        n_ticks = min(n_ticks, self.total_ticks - self.tick)
        T_sam = self.options.controller.T_sam
        for _ in range(n_ticks):
            row = self._sample()
            u_ref_abc = row.pop("_u_ref_abc")
            if self._recorder is not None:
                self._recorder.append(row)

            error = abs(row["i_ld_ref"] - row["i_ld"]) + abs(row["i_lq_ref"] - row["i_lq"])
            self.iae += error * T_sam
            if not math.isfinite(self.iae):
                raise SimulationDivergedError(self.plant.t, "tracking error became non-finite")

            duty = self._advance_plant(u_ref_abc)
            if self._recorder is not None:
                self._recorder.set_duty(duty)
            self.tick += 1
        return self.iae

    def finish(self) -> CostResult:
        """Record the closing sample at the horizon and package the result."""
        if self._recorder is not None:
            row = self._sample()
            row.pop("_u_ref_abc")
            self._recorder.append(row)
        trace = self._recorder.build() if self._recorder is not None else None
        return CostResult(iae=self.iae, diverged=False, trace=trace)

    def diverged_result(self, t: float) -> CostResult:
        trace = self._recorder.build() if self._recorder is not None else None
        return CostResult(iae=self.options.penalty, diverged=True, trace=trace, diverged_at=t)


def run_scenario(gains: SmcGains, scenario: Scenario, options: RunOptions = None) -> CostResult:
    """
    Simulate the whole horizon and return the IAE cost.

    A non-finite plant state ends the run with ``diverged=True`` and the
    penalty as cost; the partial trace (if recorded) is kept.
    """
    runner = ScenarioRunner(gains, scenario, options)
    try:
        runner.advance(runner.total_ticks)
    except SimulationDivergedError as e:
        logger.info("scenario_diverged", gains=str(gains), t=e.t)
        return runner.diverged_result(e.t)
    result = runner.finish()
    logger.debug("scenario_finished", gains=str(gains), iae=result.iae, ticks=runner.total_ticks)
    return result


class ScenarioCost:
    """Picklable cost function mapping a gain vector to its scenario IAE."""

    def __init__(self, scenario: Scenario, options: RunOptions = None):
        self.scenario = scenario
        self.options = (options or RunOptions()).with_trace(False)

    def __call__(self, x: Union[np.ndarray, Sequence[float], SmcGains]) -> float:
        gains = x if isinstance(x, SmcGains) else SmcGains.from_vector(x)
        return run_scenario(gains, self.scenario, self.options).iae

