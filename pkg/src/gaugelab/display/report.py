"""Rich tables for runs, sweeps, acceptance criteria and the run ledger."""
import math
from typing import Any, Dict, List, Sequence

from rich.table import Table
from rich.text import Text

VERDICT_STYLES = {"pass": "green", "fail": "red", "blowup": "magenta"}


def format_verdict(verdict: str) -> Text:
    return Text(verdict.upper(), style=f"bold {VERDICT_STYLES.get(verdict, 'white')}")


def format_metric(value: Any) -> str:
    """Scientific notation for floats, nan shown as a dash."""
    if value is None:
        return "-"
    if isinstance(value, float):
        if math.isnan(value):
            return "-"
        return f"{value:.4e}"
    return str(value)


def create_run_table(record) -> Table:
    """
    Summary of one ResultRecord.

    Args:
        record: Result of a single run

    Returns:
        Rich Table object
    """
    table = Table(title=f"{record.kind}: {record.name}", show_header=True, header_style="bold")
    table.add_column("Metric", style="cyan", no_wrap=True)
    table.add_column("Value", justify="right")

    table.add_row("verdict", format_verdict(record.verdict))
    for name, value in record.metrics.items():
        table.add_row(name, format_metric(value))
    table.add_row("duration", f"{record.duration_seconds:.2f}s")
    table.add_row("config hash", record.config_hash[:12])
    return table


def create_sweep_table(parameter: str, rows: Sequence[Dict[str, Any]]) -> Table:
    table = Table(title=f"Sweep over {parameter}", show_header=True, header_style="bold")
    table.add_column("Value", style="cyan")
    table.add_column("Verdict")
    table.add_column("Metric", style="dim")
    table.add_column("Statistic", justify="right")
    table.add_column("Ratio to previous", justify="right")

    for row in rows:
        table.add_row(
            str(row["value"]),
            format_verdict(row["verdict"]),
            row["metric"],
            format_metric(row["statistic"]),
            format_metric(row["ratio_to_previous"]),
        )
    return table


def create_criteria_table(results) -> Table:
    table = Table(title="Acceptance suite", show_header=True, header_style="bold")
    table.add_column("Criterion", style="cyan", no_wrap=True)
    table.add_column("Result")
    table.add_column("Time", justify="right")
    table.add_column("Detail")

    for result in results:
        table.add_row(
            result.name,
            format_verdict("pass" if result.passed else "fail"),
            f"{result.duration_seconds:.1f}s",
            result.detail,
        )
    return table


def create_history_table(runs: List[Dict[str, Any]], kind: str = None) -> Table:
    table = Table(title=f"Recent runs{f' of {kind}' if kind else ''}")
    table.add_column("ID", justify="right")
    table.add_column("Time", style="cyan")
    table.add_column("Kind", style="magenta")
    table.add_column("Name")
    table.add_column("Verdict")
    table.add_column("Duration", justify="right")
    table.add_column("Config", style="dim")

    for run in runs:
        table.add_row(
            str(run['id']),
            str(run['timestamp']),
            run['kind'],
            run['name'],
            format_verdict(run['verdict']),
            f"{run['duration_seconds'] or 0.0:.2f}s",
            run['config_hash'][:12],
        )
    return table
