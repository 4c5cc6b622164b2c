"""
CSV and plain-text writers for traces, optimizer reports, run summaries and
the method comparison table.

Every writer produces byte-identical files for identical inputs: floats use
nine significant digits and wall-clock measurements are never written.
"""

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Union

import pandas as pd
import structlog

from errors import ConfigurationError
from models.report import CampaignResult, OptimizationReport, median_curve
from models.scenario import TRACE_COLUMNS, Trace
from optimizer.base import convergence_speedup

logger = structlog.get_logger(__name__)

PathLike = Union[str, Path]
FLOAT_FORMAT = "%.9g"
COMPARISON_COLUMNS = ("method", "mean_iae", "improvement_pct", "convergence_iteration", "speedup_vs_pso")
METHOD_ORDER = ("pso", "ga", "sa")


def format_value(value) -> str:
    """Stable text form: nine significant digits for floats, blank for absent values."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return FLOAT_FORMAT % value
    return str(value)


def write_trace_csv(trace: Trace, path: PathLike) -> Path:
    """Write the per-tick trace with the fixed column set."""
    path = Path(path)
    trace.to_frame().loc[:, list(TRACE_COLUMNS)].to_csv(
        path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info("trace_written", path=str(path), rows=len(trace))
    return path


def read_trace_csv(path: PathLike) -> Trace:
    frame = pd.read_csv(path)
    if tuple(frame.columns) != TRACE_COLUMNS:
        raise ConfigurationError(f"{path}: unexpected trace columns {list(frame.columns)}")
    return Trace.from_frame(frame)


def report_lines(report: OptimizationReport) -> List[str]:
    fields = report.to_dict()
    fields.pop("wall_time_s")
    lines = [f"{key}: {format_value(value)}" for key, value in fields.items()]
    lines += ["", "iteration best_cost"]
    lines += [f"{i} {format_value(cost)}" for i, cost in enumerate(report.curve, start=1)]
    return lines


def write_report_text(report: OptimizationReport, path: PathLike) -> Path:
    """Key-value header followed by the per-iteration best-cost table."""
    path = Path(path)
    path.write_text("\n".join(report_lines(report)) + "\n", encoding="utf-8")
    return path


def write_report_csv(report: OptimizationReport, path: PathLike) -> Path:
    path = Path(path)
    frame = pd.DataFrame({
        "iteration": range(1, report.iterations + 1),
        "best_cost": report.curve,
    })
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def write_summary(summary: Mapping[str, object], path: PathLike) -> Path:
    """Plain ``key: value`` lines in the mapping's own order."""
    path = Path(path)
    path.write_text("".join(f"{k}: {format_value(v)}\n" for k, v in summary.items()), encoding="utf-8")
    return path


@dataclass(frozen=True)
class ComparisonRow:
    method: str
    mean_iae: float
    improvement_pct: Optional[float] = None
    convergence_iteration: Optional[float] = None
    speedup_vs_pso: Optional[float] = None

    def cells(self) -> Dict[str, str]:
        return {
            "method": self.method,
            "mean_iae": format_value(self.mean_iae),
            "improvement_pct": "" if self.improvement_pct is None else f"{self.improvement_pct:.2f}",
            "convergence_iteration": format_value(self.convergence_iteration),
            "speedup_vs_pso": "" if self.speedup_vs_pso is None else f"{self.speedup_vs_pso:.2f}",
        }


def improvement_pct(baseline: float, value: float) -> float:
    """(baseline - value) / baseline * 100."""
    return (baseline - value) / baseline * 100.0


def build_comparison_rows(baseline_iae: float, campaigns: Mapping[str, CampaignResult],
                          threshold: float) -> List[ComparisonRow]:
    """Baseline row first, then one row per optimizer in pso, ga, sa order."""
    rows = [ComparisonRow("baseline", float(baseline_iae))]
    crossings = {m: campaigns[m].median_convergence(threshold) for m in METHOD_ORDER if m in campaigns}
    for method in METHOD_ORDER:
        if method not in campaigns:
            continue
        mean_iae = campaigns[method].mean_cost
        speedup = None
        if method != "pso":
            speedup = convergence_speedup(crossings.get("pso"), crossings[method])
        rows.append(ComparisonRow(
            method=method,
            mean_iae=mean_iae,
            improvement_pct=improvement_pct(baseline_iae, mean_iae) if baseline_iae > 0 else None,
            convergence_iteration=crossings[method],
            speedup_vs_pso=speedup,
        ))
    return rows


def write_comparison_csv(rows: List[ComparisonRow], path: PathLike) -> Path:
    path = Path(path)
    frame = pd.DataFrame([row.cells() for row in rows], columns=list(COMPARISON_COLUMNS))
    frame.to_csv(path, index=False, lineterminator="\n")
    return path


def median_curves(campaigns: Mapping[str, CampaignResult]) -> pd.DataFrame:
    """
    Per-iteration median best cost of each optimizer, one column per method.

    Shorter runs are held at their final best cost; methods with fewer
    iterations leave the remaining cells empty.
    """
    columns = {}
    for method in METHOD_ORDER:
        if method not in campaigns:
            continue
        curves = [r.curve for r in campaigns[method].reports if r.curve]
        if not curves:
            continue
        length = max(len(c) for c in curves)
        padded = [list(c) + [c[-1]] * (length - len(c)) for c in curves]
        columns[method] = pd.Series(median_curve(padded), index=range(1, length + 1))
    frame = pd.DataFrame(columns)
    frame.index.name = "iteration"
    return frame


def write_median_curves_csv(campaigns: Mapping[str, CampaignResult], path: PathLike) -> Path:
    path = Path(path)
    median_curves(campaigns).to_csv(path, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info("median_curves_written", path=str(path), methods=list(campaigns))
    return path
