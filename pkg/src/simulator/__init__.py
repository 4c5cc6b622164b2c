"""
Closed-loop simulation components.

This package contains the frame transforms, the switching plant with its
compiled micro-step kernels, the cascaded controller, the scenario engine
and trace metrics.
"""

from .control import CascadedController, synthesize_voltage_gains
from .engine import RunOptions, ScenarioCost, ScenarioRunner, default_scenario, run_scenario
from .plant import InverterPlant

__all__ = [
    "CascadedController", "synthesize_voltage_gains",
    "RunOptions", "ScenarioCost", "ScenarioRunner", "default_scenario", "run_scenario",
    "InverterPlant",
]
