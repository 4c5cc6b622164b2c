"""
Tests for trace metrics: step quality, windowed IAE and the per-phase breakdown.
"""

import math

import numpy as np
import pytest

from conftest import make_trace
from errors import ParameterError
from models.control import SmcGains
from models.scenario import CostResult, EventKind, Scenario, ScenarioEvent
from simulator.metrics import (chattering_index, event_windows, mean_tracking_error, run_summary,
                               scenario_breakdown, tracking_metrics, window_iae)

T_SAM = 1e-5


def time_axis(n: int) -> np.ndarray:
    return np.arange(n) * T_SAM


class TestTrackingMetrics:
    def test_perfect_tracking(self):
        t = time_axis(1000)
        ref = np.where(t < 5e-3, 0.0, 1.0)
        metrics = tracking_metrics(make_trace(t, ref, ref), 4e-3, 1e-2)
        assert metrics.overshoot == 0.0
        assert metrics.settling_time == 0.0
        assert metrics.steady_state_error == 0.0

    def test_first_order_settling(self):
        tau = 1e-3
        t = time_axis(5000)
        y = 1.0 - np.exp(-t / tau)
        metrics = tracking_metrics(make_trace(t, np.ones_like(t), y), 0.0, 0.05)
        assert metrics.settling_time == pytest.approx(tau * math.log(50), rel=1e-2)
        assert metrics.overshoot == 0.0
        assert metrics.steady_state_error < 1e-9

    def test_ten_percent_overshoot(self):
        t = time_axis(200)
        y = np.ones_like(t)
        y[0] = 0.0
        y[50] = 1.1
        metrics = tracking_metrics(make_trace(t, np.ones_like(t), y), 0.0, 1.0)
        assert metrics.overshoot == pytest.approx(10.0)
        assert metrics.settling_time == pytest.approx(51 * T_SAM)

    def test_downward_step_overshoot(self):
        t = time_axis(200)
        y = np.zeros_like(t)
        y[0] = 10.0
        y[20] = -0.5
        metrics = tracking_metrics(make_trace(t, np.zeros_like(t), y), 0.0, 1.0)
        assert metrics.overshoot == pytest.approx(5.0)

    def test_never_settles(self):
        t = time_axis(100)
        y = np.full_like(t, 0.5)
        y[0] = 0.0
        metrics = tracking_metrics(make_trace(t, np.ones_like(t), y), 0.0, 1.0)
        assert metrics.settling_time is None
        assert metrics.steady_state_error == pytest.approx(0.5)

    def test_no_step_means_no_overshoot(self):
        t = time_axis(100)
        metrics = tracking_metrics(make_trace(t, np.ones_like(t), np.ones_like(t)), 0.0, 1.0)
        assert metrics.overshoot is None

    def test_q_axis(self):
        t = time_axis(100)
        zeros = np.zeros_like(t)
        y_q = np.ones_like(t)
        y_q[0] = 0.0
        metrics = tracking_metrics(make_trace(t, zeros, zeros, np.ones_like(t), y_q), 0.0, 1.0, axis="q")
        assert metrics.overshoot == 0.0

    def test_empty_window(self):
        t = time_axis(10)
        with pytest.raises(ParameterError):
            tracking_metrics(make_trace(t, t, t), 1.0, 2.0)

    def test_bad_axis(self):
        t = time_axis(10)
        with pytest.raises(ParameterError):
            tracking_metrics(make_trace(t, t, t), 0.0, 1.0, axis="z")


class TestWindowIae:
    def test_constant_error(self):
        t = time_axis(101)
        trace = make_trace(t, np.ones_like(t), np.zeros_like(t), np.zeros_like(t), np.full_like(t, 0.5))
        assert window_iae(trace, 0.0, 1.0) == pytest.approx(100 * 1.5 * T_SAM)
        assert window_iae(trace, 0.0, 50 * T_SAM) == pytest.approx(50 * 1.5 * T_SAM)

    def test_mean_tracking_error(self):
        t = time_axis(11)
        trace = make_trace(t, np.full_like(t, 2.0), np.zeros_like(t))
        assert mean_tracking_error(trace, 0.0, 1.0) == pytest.approx(2.0)

    def test_single_row_is_zero(self):
        trace = make_trace([0.0], [1.0], [0.0])
        assert window_iae(trace, 0.0, 1.0) == 0.0


class TestScenarioPhases:
    @pytest.fixture
    def scenario(self):
        return Scenario(horizon=1e-3, events=[
            ScenarioEvent(2e-4, EventKind.SCALE_LINEAR, 0.5),
            ScenarioEvent(6e-4, EventKind.DISCONNECT_LINEAR),
            ScenarioEvent(6e-4, EventKind.CONNECT_NONLINEAR),
        ])

    def test_event_windows(self, scenario):
        windows = event_windows(scenario)
        assert [w[0] for w in windows] == [
            "initial", "scale_linear@0.0002", "disconnect_linear+connect_nonlinear@0.0006"]
        assert windows[0][1:] == (0.0, 2e-4)
        assert windows[-1][2] == 1e-3

    def test_breakdown_sums_to_total(self, scenario):
        rng = np.random.default_rng(3)
        t = time_axis(101)
        trace = make_trace(t, rng.normal(size=101), rng.normal(size=101),
                           rng.normal(size=101), rng.normal(size=101))
        breakdown = scenario_breakdown(trace, scenario)
        assert len(breakdown) == 3
        assert sum(breakdown.values()) == pytest.approx(window_iae(trace, 0.0, 1.0))

    def test_run_summary_fields(self, scenario):
        t = time_axis(101)
        ref = np.ones_like(t)
        y = np.ones_like(t)
        y[0] = 0.0
        result = CostResult(iae=0.1, trace=make_trace(t, ref, y))
        summary = run_summary(result, scenario, SmcGains(1000.0, 1000.0, 0.5))
        assert list(summary)[:8] == ["scenario", "horizon_s", "k_cd", "k_cq", "k_sat",
                                     "iae", "diverged", "diverged_at_s"]
        assert summary["rows"] == 101
        assert summary["initial.iae"] == pytest.approx(T_SAM)
        assert "scale_linear@0.0002.settling_time_s" in summary

    def test_run_summary_without_trace(self, scenario):
        summary = run_summary(CostResult(iae=1e6, diverged=True, diverged_at=1e-4), scenario,
                              SmcGains(1000.0, 1000.0, 0.5))
        assert summary["diverged"] is True
        assert "rows" not in summary


class TestChattering:
    def test_total_variation(self):
        assert chattering_index([0.0, 1.0, -1.0, -1.0]) == pytest.approx(3.0)

    def test_short_signal(self):
        assert chattering_index([5.0]) == 0.0
