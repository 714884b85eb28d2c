"""Output formatting and run manifests."""

from .manifest import RunManifest
from .output import OutputFormatter, csv_text, format_number, json_document, json_lines

__all__ = [
    "OutputFormatter",
    "RunManifest",
    "csv_text",
    "format_number",
    "json_document",
    "json_lines",
]
