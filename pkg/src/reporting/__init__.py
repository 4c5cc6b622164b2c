"""
Output writers and console tables.
"""

from .tables import campaign_table, comparison_table, render_comparison
from .writers import (ComparisonRow, build_comparison_rows, read_trace_csv, write_comparison_csv,
                      write_report_csv, write_report_text, write_summary, write_trace_csv)

__all__ = [
    "campaign_table", "comparison_table", "render_comparison",
    "ComparisonRow", "build_comparison_rows", "read_trace_csv", "write_comparison_csv",
    "write_report_csv", "write_report_text", "write_summary", "write_trace_csv",
]
