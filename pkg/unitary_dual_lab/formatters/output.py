"""Artifact writers and rich display helpers."""

import csv
import io
import json
from typing import Any, Dict, Iterable, List, Optional, Sequence

from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.syntax import Syntax
from rich.table import Table

DECIMALS = 10


def format_number(value: float) -> str:
    """Fixed-point text with ten decimals; negative zero prints as zero."""
    text = f"{float(value):.{DECIMALS}f}"
    if text.startswith("-") and float(text) == 0:
        text = text[1:]
    return text


def _cell(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return "" if value is None else str(value).lower()
    if isinstance(value, float):
        return format_number(value)
    return str(value)


def _json_ready(value: Any) -> Any:
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, dict):
        return {k: _json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(v) for v in value]
    return value


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """CSV with a header row; floats use fixed ten-decimal formatting."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(value) for value in row])
    return buffer.getvalue()


def json_lines(records: Iterable[Dict[str, Any]]) -> str:
    """One JSON object per line."""
    return "".join(json.dumps(_json_ready(record), sort_keys=True) + "\n" for record in records)


def json_document(data: Dict[str, Any]) -> str:
    return json.dumps(_json_ready(data), indent=2, sort_keys=True) + "\n"


class OutputFormatter:
    """Rich rendering of tables and JSON reports for ``--display table``."""

    def __init__(self, console: Optional[Console] = None):
        """Initialize output formatter.

        Args:
            console: Rich console instance
        """
        self.console = console or Console()

    def format_json(self, data: Dict[str, Any], title: str = "Report") -> None:
        """Display JSON data with syntax highlighting.

        Args:
            data: Data to format
            title: Panel title
        """
        syntax = Syntax(json_document(data), "json", theme="monokai", line_numbers=False)
        self.console.print(Panel(syntax, title=title, border_style="cyan"))

    def format_table(
        self, header: Sequence[str], rows: List[Sequence[Any]], title: str = "Results"
    ) -> None:
        """Display rows as a rich table.

        Args:
            header: Column names
            rows: Row values in column order
            title: Table title
        """
        if not rows:
            self.console.print("[yellow]No results[/yellow]")
            return

        table = Table(title=title, box=box.ROUNDED, show_header=True, header_style="bold magenta")
        for name in header:
            table.add_column(name, style="cyan", justify="right")
        for row in rows:
            table.add_row(*(_cell(value) for value in row))
        self.console.print(table)

    def format_summary(self, items: Dict[str, Any], title: str = "Summary") -> None:
        """Display key/value pairs in a two-column table."""
        table = Table(title=title, box=box.SIMPLE)
        table.add_column("Field", style="yellow")
        table.add_column("Value", style="white")
        for key, value in items.items():
            table.add_row(key, _cell(value))
        self.console.print(table)
