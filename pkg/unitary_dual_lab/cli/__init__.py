"""Command-line interface for Unitary Dual Lab."""

from .main import cli, main

__all__ = ["cli", "main"]
