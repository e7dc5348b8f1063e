"""
Console helper utilities for the CLI interface.

This module provides colors and Rich tables for the human-readable side
of the CLI. Machine-readable output never goes through these helpers.
"""

from collections.abc import Sequence

from rich.panel import Panel
from rich.table import Table

from src.infrastructure.persistence.report_repository import ComparisonRow, RunMetrics


class ConsoleColors:
    """
    Console color constants for Rich formatting.

    Provides consistent color scheme across the CLI interface
    using Rich markup syntax.
    """

    SUCCESS = "green"
    ERROR = "red"
    WARNING = "yellow"
    INFO = "blue"


def format_accuracy(accuracy: float | None) -> str:
    """
    Format an accuracy percentage, or a dash when there is no gold lexicon.

    Args:
        accuracy: Percentage in [0, 100] or None

    Returns:
        Formatted value with Rich color markup
    """
    if accuracy is None:
        return "-"
    color = ConsoleColors.SUCCESS if accuracy >= 50.0 else ConsoleColors.WARNING
    return f"[{color}]{accuracy:.2f}%[/{color}]"


def format_comparison_table(rows: Sequence[ComparisonRow]) -> Table:
    """
    Create a Rich table with time per iteration and accuracy per method.

    Args:
        rows: Comparison rows in run order

    Returns:
        Rich Table instance
    """
    table = Table(title="Method comparison")
    table.add_column("Method", style="bold")
    table.add_column("Time / iter (s)", justify="right")
    table.add_column("Accuracy", justify="right")
    for row in rows:
        table.add_row(row.method, f"{row.seconds_per_iter:.4f}", format_accuracy(row.accuracy))
    return table


def format_run_summary(metrics: RunMetrics, out_dir: str) -> Panel:
    """Summary panel printed after a training run."""
    lines = [
        f"[bold]Method:[/bold] {metrics.method}",
        f"[bold]Iterations:[/bold] {metrics.iterations}",
        f"[bold]Time / iter:[/bold] {metrics.seconds_per_iter:.4f}s",
        f"[bold]Accuracy:[/bold] {format_accuracy(metrics.accuracy)}",
    ]
    if metrics.bleu is not None:
        lines.append(f"[bold]BLEU:[/bold] {metrics.bleu:.2f}")
    lines.append(f"[dim]{out_dir}[/dim]")
    return Panel("\n".join(lines), title="Run complete", border_style=ConsoleColors.SUCCESS)
