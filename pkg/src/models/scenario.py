"""
Scenario, trace and cost-result models for closed-loop simulation runs.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional

import numpy as np
import pandas as pd

from errors import ConfigurationError
from models.plant import LinearLoadParams, Topology

TRACE_COLUMNS = (
    "t", "i_ld_ref", "i_lq_ref", "i_ld", "i_lq",
    "u_cd", "u_cq", "u_dref", "u_qref", "iae",
)
DUTY_COLUMNS = ("duty_a", "duty_b", "duty_c")


class EventKind(str, Enum):
    """Timed scenario events, in their execution order for equal timestamps."""
    CONNECT_LINEAR = "connect_linear"
    DISCONNECT_LINEAR = "disconnect_linear"
    SCALE_LINEAR = "scale_linear"
    CONNECT_NONLINEAR = "connect_nonlinear"
    DISCONNECT_NONLINEAR = "disconnect_nonlinear"
    SCALE_PLANT = "scale_plant"
    SCALE_CONTROLLER = "scale_controller"

    @property
    def priority(self) -> int:
        return list(EventKind).index(self)

    @property
    def takes_factor(self) -> bool:
        return self in (EventKind.SCALE_LINEAR, EventKind.SCALE_PLANT, EventKind.SCALE_CONTROLLER)


@dataclass(frozen=True)
class ScenarioEvent:
    time: float
    kind: EventKind
    factor: float = 1.0

    def sort_key(self):
        return (self.time, self.kind.priority, self.factor)


@dataclass
class Scenario:
    """Horizon, initial topology, linear-load values and the timed event list.

    Events sharing a timestamp are allowed (the load swap at 0.2 s is two
    events); execution order is always by (time, kind), never by list order.
    """
    horizon: float = 0.7
    events: List[ScenarioEvent] = field(default_factory=list)
    initial_topology: Topology = field(default_factory=Topology)
    linear_load: LinearLoadParams = field(default_factory=LinearLoadParams)
    name: str = "custom"

    def __post_init__(self):
        if self.horizon < 0:
            raise ConfigurationError(f"horizon must be non-negative, got {self.horizon}")
        for event in self.events:
            if not 0.0 <= event.time <= self.horizon:
                raise ConfigurationError(
                    f"event {event.kind.value} at t={event.time} lies outside [0, {self.horizon}]")
            if event.kind.takes_factor and not event.factor > 0:
                raise ConfigurationError(f"event {event.kind.value} needs a positive factor")

    def sorted_events(self) -> List[ScenarioEvent]:
        return sorted(self.events, key=ScenarioEvent.sort_key)

    def truncated(self, horizon: float) -> "Scenario":
        """Same scenario cut to a shorter horizon; later events are dropped."""
        return Scenario(
            horizon=horizon,
            events=[e for e in self.events if e.time <= horizon],
            initial_topology=Topology(self.initial_topology.linear, self.initial_topology.nonlinear),
            linear_load=self.linear_load,
            name=self.name,
        )


@dataclass
class Trace:
    """Signals sampled at every controller tick."""
    columns: Dict[str, np.ndarray]

    def __len__(self) -> int:
        return len(self.columns["t"])

    def __getitem__(self, name: str) -> np.ndarray:
        return self.columns[name]

    @property
    def t(self) -> np.ndarray:
        return self.columns["t"]

    @property
    def T_sam(self) -> float:
        t = self.columns["t"]
        return float(t[1] - t[0]) if len(t) > 1 else 0.0

    def to_frame(self, include_duty: bool = False) -> pd.DataFrame:
        names = TRACE_COLUMNS + (DUTY_COLUMNS if include_duty else ())
        return pd.DataFrame({name: self.columns[name] for name in names if name in self.columns})

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "Trace":
        return cls(columns={name: frame[name].to_numpy(dtype=float) for name in frame.columns})

    def window(self, start: float, end: float) -> np.ndarray:
        """Boolean mask of rows with start <= t < end."""
        t = self.columns["t"]
        return (t >= start - 1e-12) & (t < end - 1e-12)


@dataclass
class CostResult:
    """Outcome of one closed-loop evaluation."""
    iae: float
    diverged: bool = False
    trace: Optional[Trace] = None
    diverged_at: Optional[float] = None

    def __post_init__(self):
        if self.iae < 0:
            raise ValueError(f"IAE cannot be negative, got {self.iae}")


@dataclass
class TrackingMetrics:
    """Step-response quality of a tracked signal inside a time window."""
    overshoot: Optional[float]
    settling_time: Optional[float]
    steady_state_error: float

    def to_dict(self) -> Dict[str, Optional[float]]:
        return {
            "overshoot_pct": self.overshoot,
            "settling_time_s": self.settling_time,
            "steady_state_error_a": self.steady_state_error,
        }
