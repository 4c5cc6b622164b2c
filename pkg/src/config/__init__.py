"""
Configuration management for the grid-forming inverter tuner.
"""

from .settings import Settings, load_scenario, dump_scenario

__all__ = ["Settings", "load_scenario", "dump_scenario"]
