"""
Shared fixtures for the unit, integration and benchmark suites.
"""

import json
import logging

import numpy as np
import pytest

from config.settings import Settings
from models.control import SmcGains
from models.plant import LinearLoadParams, Topology
from models.scenario import TRACE_COLUMNS, EventKind, Scenario, ScenarioEvent, Trace
from simulator.engine import RunOptions


@pytest.fixture
def settings():
    return Settings()


@pytest.fixture
def baseline_gains():
    return SmcGains(k_cd=1000.0, k_cq=1000.0, k_sat=0.5)


@pytest.fixture
def run_options():
    return RunOptions()


@pytest.fixture
def short_scenario():
    """Three events inside 20 ms, two of them sharing a timestamp."""
    return Scenario(
        horizon=0.02,
        events=[
            ScenarioEvent(0.005, EventKind.SCALE_LINEAR, 0.5),
            ScenarioEvent(0.01, EventKind.CONNECT_NONLINEAR),
            ScenarioEvent(0.01, EventKind.DISCONNECT_LINEAR),
            ScenarioEvent(0.015, EventKind.SCALE_PLANT, 1.4),
        ],
        initial_topology=Topology(linear=True, nonlinear=False),
        linear_load=LinearLoadParams(),
        name="short",
    )


def make_trace(t, ref_d, y_d, ref_q=None, y_q=None) -> Trace:
    """Trace with the given current columns; every other column is zero."""
    t = np.asarray(t, dtype=float)
    zeros = np.zeros_like(t)
    columns = {name: zeros.copy() for name in TRACE_COLUMNS}
    columns.update({
        "t": t,
        "i_ld_ref": np.asarray(ref_d, dtype=float),
        "i_ld": np.asarray(y_d, dtype=float),
        "i_lq_ref": zeros.copy() if ref_q is None else np.asarray(ref_q, dtype=float),
        "i_lq": zeros.copy() if y_q is None else np.asarray(y_q, dtype=float),
    })
    return Trace(columns=columns)


@pytest.fixture
def tiny_config(tmp_path):
    """Settings file with optimizer budgets small enough for CLI round trips."""
    document = {
        "pso": {"swarm_size": 2, "max_iterations": 45},
        "ga": {"population": 4, "generations": 2},
        "sa": {"iterations": 2, "moves_per_temperature": 2},
    }
    path = tmp_path / "tiny_config.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    return path


@pytest.fixture(autouse=True)
def detach_log_handlers():
    """The CLI installs root handlers bound to the runner's streams; drop them after each test."""
    yield
    root = logging.getLogger()
    for handler in list(root.handlers):
        if type(handler) not in (logging.StreamHandler, logging.FileHandler):
            continue
        root.removeHandler(handler)
        handler.close()
