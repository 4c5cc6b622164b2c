"""
Data models for the grid-forming inverter simulator and tuner.
"""

from .signals import ThreePhase, TwoAxis, DqPair
from .plant import (PlantParams, LinearLoadParams, NonlinearLoadParams,
                    SwitchState, Topology, PlantState)
from .control import VoltageLoopGains, SmcGains, ControllerConfig, ControllerState
from .scenario import (EventKind, ScenarioEvent, Scenario, Trace, CostResult,
                       TrackingMetrics, TRACE_COLUMNS)
from .report import (SearchSpace, PsoConfig, GaConfig, SaConfig,
                     OptimizationReport, CampaignResult)

__all__ = [
    "ThreePhase", "TwoAxis", "DqPair",
    "PlantParams", "LinearLoadParams", "NonlinearLoadParams", "SwitchState", "Topology", "PlantState",
    "VoltageLoopGains", "SmcGains", "ControllerConfig", "ControllerState",
    "EventKind", "ScenarioEvent", "Scenario", "Trace", "CostResult", "TrackingMetrics", "TRACE_COLUMNS",
    "SearchSpace", "PsoConfig", "GaConfig", "SaConfig", "OptimizationReport", "CampaignResult",
]
