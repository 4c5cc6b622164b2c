"""
Grid-forming inverter SMC tuner

A switching-level simulator of a grid-forming inverter with a cascaded PI
voltage / sliding-mode current controller, and metaheuristic offline tuning
of the current-loop gains.
"""

__version__ = "1.0.0"
__author__ = "GFM Tuner Team"
__email__ = "support@example.com"

from .simulator import RunOptions, default_scenario, run_scenario
from .optimizer import ga_minimize, pso_minimize, run_campaign, sa_minimize
from .models import SmcGains, Scenario, SearchSpace

__all__ = [
    "RunOptions",
    "default_scenario",
    "run_scenario",
    "pso_minimize",
    "ga_minimize",
    "sa_minimize",
    "run_campaign",
    "SmcGains",
    "Scenario",
    "SearchSpace",
]
