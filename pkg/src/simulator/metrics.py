"""
Performance metrics computed from recorded traces: step-response quality,
windowed IAE, per-phase cost breakdown and chattering.
"""

from collections import OrderedDict
from typing import Dict, List, Sequence, Tuple

import numpy as np
import structlog

from errors import ParameterError
from models.control import GAIN_NAMES, SmcGains
from models.scenario import CostResult, Scenario, TrackingMetrics, Trace

logger = structlog.get_logger(__name__)

SETTLING_BAND = 0.02
STEADY_STATE_FRACTION = 0.2


def _axis_columns(axis: str) -> Tuple[str, str]:
    if axis not in ("d", "q"):
        raise ParameterError(f"axis must be 'd' or 'q', got {axis!r}")
    return f"i_l{axis}_ref", f"i_l{axis}"


def tracking_metrics(trace: Trace, start: float, end: float, axis: str = "d",
                     min_step: float = 1e-6) -> TrackingMetrics:
    """
    Step-response quality of the inductor current inside [start, end).

    The step runs from the measured value at the window start to the mean
    reference over the final 20 % of the window. Overshoot is the peak
    excursion past that final value as a percentage of the step; the
    settling time is measured from ``start`` until the tracking error stays
    within 2 % of the final reference; the steady-state error is the mean
    absolute tracking error over the final 20 %.

    Args:
        trace: Recorded run
        start: Window start (s)
        end: Window end (s), exclusive
        axis: "d" or "q"
        min_step: Step magnitudes below this report overshoot as absent

    Returns:
        TrackingMetrics
    """
    ref_name, meas_name = _axis_columns(axis)
    mask = trace.window(start, end)
    if not np.any(mask):
        raise ParameterError(f"window [{start}, {end}) holds no samples")

    t = trace.t[mask]
    ref = trace[ref_name][mask]
    y = trace[meas_name][mask]

    tail = max(1, int(np.ceil(len(t) * STEADY_STATE_FRACTION)))
    final = float(np.mean(ref[-tail:]))
    step = final - float(y[0])
    steady_state_error = float(np.mean(np.abs(ref[-tail:] - y[-tail:])))

    overshoot = None
    if abs(step) > min_step:
        excursion = np.max(np.sign(step) * (y - final))
        overshoot = float(max(0.0, excursion) / abs(step) * 100.0)

    scale = abs(final) if abs(final) > min_step else abs(step)
    settling_time = None
    if scale > 0:
        outside = np.nonzero(np.abs(ref - y) > SETTLING_BAND * scale)[0]
        if len(outside) == 0:
            settling_time = 0.0
        elif outside[-1] + 1 < len(t):
            settling_time = float(t[outside[-1] + 1] - start)

    return TrackingMetrics(overshoot=overshoot, settling_time=settling_time,
                           steady_state_error=steady_state_error)


def _cost_rows(trace: Trace, start: float, end: float) -> np.ndarray:
    # the closing sample at the horizon is recorded but never integrated
    mask = trace.window(start, end)
    mask[len(mask) - 1:] = False
    return mask


def window_iae(trace: Trace, start: float, end: float) -> float:
    """Rectangle-rule IAE of the ticks in [start, end)."""
    if len(trace) < 2:
        return 0.0
    mask = _cost_rows(trace, start, end)
    error = (np.abs(trace["i_ld_ref"][mask] - trace["i_ld"][mask])
             + np.abs(trace["i_lq_ref"][mask] - trace["i_lq"][mask]))
    return float(np.sum(error) * trace.T_sam)


def mean_tracking_error(trace: Trace, start: float, end: float) -> float:
    """Per-sample mean of |e_d| + |e_q| over the ticks in [start, end)."""
    mask = _cost_rows(trace, start, end)
    if not np.any(mask):
        raise ParameterError(f"window [{start}, {end}) holds no samples")
    error = (np.abs(trace["i_ld_ref"][mask] - trace["i_ld"][mask])
             + np.abs(trace["i_lq_ref"][mask] - trace["i_lq"][mask]))
    return float(np.mean(error))


def event_windows(scenario: Scenario) -> List[Tuple[str, float, float]]:
    """Split the horizon at event times; each phase is named after the events opening it."""
    grouped: Dict[float, List[str]] = OrderedDict()
    for event in scenario.sorted_events():
        if 0.0 < event.time < scenario.horizon:
            grouped.setdefault(event.time, []).append(event.kind.value)

    bounds = [0.0] + list(grouped) + [scenario.horizon]
    labels = ["initial"] + [f"{'+'.join(kinds)}@{time:g}" for time, kinds in grouped.items()]
    return [(label, bounds[i], bounds[i + 1]) for i, label in enumerate(labels)]


def scenario_breakdown(trace: Trace, scenario: Scenario) -> Dict[str, float]:
    """IAE per scenario phase; the values add up to the run's total IAE."""
    breakdown = OrderedDict()
    for label, start, end in event_windows(scenario):
        # the last phase also covers rounding at the horizon
        stop = end if end < scenario.horizon else end + 1.0
        breakdown[label] = window_iae(trace, start, stop)
    return breakdown


def chattering_index(values: Sequence[float]) -> float:
    """Total variation of a sampled signal."""
    values = np.asarray(values, dtype=float)
    if len(values) < 2:
        return 0.0
    return float(np.sum(np.abs(np.diff(values))))


def run_summary(result: CostResult, scenario: Scenario, gains: SmcGains) -> Dict[str, object]:
    """IAE, divergence status and per-phase step quality of a recorded run, in a fixed order."""
    summary: Dict[str, object] = OrderedDict()
    summary["scenario"] = scenario.name
    summary["horizon_s"] = scenario.horizon
    summary.update(zip(GAIN_NAMES, gains.to_vector().tolist()))
    summary["iae"] = result.iae
    summary["diverged"] = result.diverged
    summary["diverged_at_s"] = result.diverged_at
    trace = result.trace
    if trace is None:
        return summary

    summary["rows"] = len(trace)
    summary["chattering_u_dref"] = chattering_index(trace["u_dref"])
    summary["chattering_u_qref"] = chattering_index(trace["u_qref"])
    for label, start, end in event_windows(scenario):
        stop = end if end < scenario.horizon else end + 1.0
        if not np.any(_cost_rows(trace, start, stop)):
            continue
        summary[f"{label}.iae"] = window_iae(trace, start, stop)
        metrics = tracking_metrics(trace, start, stop)
        for key, value in metrics.to_dict().items():
            summary[f"{label}.{key}"] = value
    return summary
