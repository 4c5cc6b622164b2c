#!/usr/bin/env python3
"""
Output Validation Tool - Validate emitted trace, convergence, median-curve and comparison CSVs.

Each file is recognized by its header, parsed back with pandas and checked
against the declared schema and the arithmetic it must satisfy (horizon row
count, monotone best-so-far curves, improvement percentages).
"""

import argparse
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

# Add src to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from models.scenario import TRACE_COLUMNS  # noqa: E402
from reporting.writers import COMPARISON_COLUMNS, METHOD_ORDER  # noqa: E402

CURVE_COLUMNS = ("iteration", "best_cost")


@dataclass
class ValidationResult:
    """Results from validating one output file."""
    kind: str
    is_valid: bool
    errors: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    statistics: Dict[str, Any] = field(default_factory=dict)


class OutputValidator:
    """Validator for the CSV files written by the simulator and tuner."""

    def __init__(self, horizon: Optional[float] = None, T_sam: float = 50e-6):
        self.horizon = horizon
        self.T_sam = T_sam

    def validate_file(self, csv_path: Path) -> ValidationResult:
        try:
            frame = pd.read_csv(csv_path)
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            return ValidationResult(kind="unknown", is_valid=False, errors=[f"Unreadable CSV: {e}"])

        columns = tuple(frame.columns)
        if columns == TRACE_COLUMNS:
            errors, warnings, stats = self._validate_trace(frame)
            kind = "trace"
        elif columns == CURVE_COLUMNS:
            errors, warnings, stats = self._validate_curve(frame)
            kind = "curve"
        elif columns == COMPARISON_COLUMNS:
            errors, warnings, stats = self._validate_comparison(frame)
            kind = "comparison"
        elif len(columns) > 1 and columns[0] == "iteration" and set(columns[1:]) <= set(METHOD_ORDER):
            errors, warnings, stats = self._validate_median_curves(frame)
            kind = "median_curves"
        else:
            return ValidationResult(kind="unknown", is_valid=False,
                                    errors=[f"Unrecognized columns: {list(columns)}"])
        return ValidationResult(kind=kind, is_valid=not errors, errors=errors,
                                warnings=warnings, statistics=stats)

    def _validate_trace(self, frame: pd.DataFrame):
        errors, warnings = [], []
        values = frame.to_numpy(dtype=float)
        if not np.all(np.isfinite(values)):
            errors.append("Trace holds non-finite values")

        t = frame["t"].to_numpy(dtype=float)
        if len(t) > 1:
            steps = np.diff(t)
            if np.any(steps <= 0):
                errors.append("Time column is not strictly increasing")
            elif np.max(np.abs(steps - self.T_sam)) > 1e-6 * self.T_sam + 1e-12:
                errors.append(f"Time step differs from T_sam={self.T_sam}")

        iae = frame["iae"].to_numpy(dtype=float)
        if len(iae) and iae[0] != 0.0:
            errors.append(f"Running IAE starts at {iae[0]}, expected 0")
        if np.any(np.diff(iae) < 0):
            errors.append("Running IAE decreases")

        if self.horizon is not None:
            expected = int(math.floor(self.horizon / self.T_sam + 1e-9)) + 1
            if len(frame) != expected:
                errors.append(f"Row count {len(frame)} != floor(horizon/T_sam) + 1 = {expected}")
        elif len(t) and abs(t[-1] - (len(t) - 1) * self.T_sam) > 1e-9:
            warnings.append("Last time stamp does not match the row count")

        stats = {"rows": len(frame), "final_iae": float(iae[-1]) if len(iae) else 0.0}
        return errors, warnings, stats

    def _validate_curve(self, frame: pd.DataFrame):
        errors, warnings = [], []
        iterations = frame["iteration"].to_numpy()
        if not np.array_equal(iterations, np.arange(1, len(frame) + 1)):
            errors.append("Iterations are not numbered 1..n")
        cost = frame["best_cost"].to_numpy(dtype=float)
        if np.any(np.diff(cost) > 0):
            errors.append("Best-so-far curve increases")
        if np.any(cost < 0):
            errors.append("Negative cost in curve")
        return errors, warnings, {"iterations": len(frame), "final_cost": float(cost[-1]) if len(cost) else None}

    def _validate_median_curves(self, frame: pd.DataFrame):
        errors, warnings = [], []
        iterations = frame["iteration"].to_numpy()
        if not np.array_equal(iterations, np.arange(1, len(frame) + 1)):
            errors.append("Iterations are not numbered 1..n")
        for method in frame.columns[1:]:
            cost = frame[method].dropna().to_numpy(dtype=float)
            if frame[method].isna().to_numpy()[:len(cost)].any():
                errors.append(f"{method}: empty cells before the end of the curve")
            if np.any(np.diff(cost) > 0):
                errors.append(f"{method}: median curve increases")
        return errors, warnings, {"iterations": len(frame), "methods": list(frame.columns[1:])}

    def _validate_comparison(self, frame: pd.DataFrame):
        errors, warnings = [], []
        methods = list(frame["method"])
        if not methods or methods[0] != "baseline":
            errors.append("First row must be the baseline")
            return errors, warnings, {}
        baseline = frame.iloc[0]
        for name in ("improvement_pct", "convergence_iteration", "speedup_vs_pso"):
            if not pd.isna(baseline[name]):
                errors.append(f"Baseline {name} cell must be empty")

        base_iae = float(baseline["mean_iae"])
        for _, row in frame.iloc[1:].iterrows():
            expected = (base_iae - float(row["mean_iae"])) / base_iae * 100.0
            if pd.isna(row["improvement_pct"]) or abs(round(expected, 2) - float(row["improvement_pct"])) > 0.0051:
                errors.append(f"{row['method']}: improvement {row['improvement_pct']} "
                              f"inconsistent with IAE cells ({expected:.2f})")
        return errors, warnings, {"methods": methods}

    def print_validation_report(self, result: ValidationResult, csv_path: Path):
        print(f"\n{'=' * 60}")
        print(f"VALIDATION REPORT: {csv_path.name} ({result.kind})")
        print(f"{'=' * 60}")
        print(f"Status: {'VALID' if result.is_valid else 'INVALID'}")
        for i, error in enumerate(result.errors, 1):
            print(f"  ERROR {i}. {error}")
        for i, warning in enumerate(result.warnings, 1):
            print(f"  WARNING {i}. {warning}")
        for key, value in result.statistics.items():
            print(f"  {key}: {value}")


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="Simulator/tuner output validation tool")
    parser.add_argument("paths", nargs="+", type=Path, help="CSV files or directories")
    parser.add_argument("--horizon", type=float, default=None, help="Expected trace horizon (s)")
    parser.add_argument("--t-sam", type=float, default=50e-6, help="Sampling period (s)")
    args = parser.parse_args(argv)

    validator = OutputValidator(horizon=args.horizon, T_sam=args.t_sam)
    files = []
    for path in args.paths:
        files.extend(sorted(path.glob("*.csv")) if path.is_dir() else [path])

    valid = 0
    for csv_path in files:
        if not csv_path.exists():
            print(f"Error: File not found: {csv_path}")
            continue
        result = validator.validate_file(csv_path)
        validator.print_validation_report(result, csv_path)
        valid += result.is_valid

    print(f"\nValid files: {valid}/{len(files)}")
    return 0 if files and valid == len(files) else 1


if __name__ == "__main__":
    sys.exit(main())
