"""
Console rendering of comparison and campaign tables.
"""

from typing import Iterable, List, Optional

from rich.console import Console
from rich.table import Table

from models.report import CampaignResult
from reporting.writers import COMPARISON_COLUMNS, ComparisonRow, format_value


def comparison_table(rows: List[ComparisonRow]) -> Table:
    table = Table(title="Method comparison")
    for name in COMPARISON_COLUMNS:
        table.add_column(name, justify="left" if name == "method" else "right")
    for row in rows:
        cells = row.cells()
        table.add_row(*(cells[name] for name in COMPARISON_COLUMNS))
    return table


def render_comparison(rows: List[ComparisonRow], console: Optional[Console] = None) -> None:
    (console or Console()).print(comparison_table(rows))


def campaign_table(campaigns: Iterable[CampaignResult]) -> Table:
    table = Table(title="Campaign spread")
    for name in ("method", "runs", "mean_cost", "std_cost", "min_cost", "max_cost"):
        table.add_column(name, justify="left" if name == "method" else "right")
    for campaign in campaigns:
        summary = campaign.summary()
        table.add_row(*(format_value(v) for v in summary.values()))
    return table
