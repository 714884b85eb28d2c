"""Main CLI entry point for Unitary Dual Lab."""

import sys
from pathlib import Path

import click
from rich.console import Console

from ..config.manager import ConfigManager
from ..core.exceptions import ConfigurationError
from ..formatters.output import OutputFormatter
from ..logging.logger import setup_logging
from .commands import compare, config_cmd, moments, partitions, schurmann, simulate

console = Console(stderr=True)
formatter = OutputFormatter(Console())


@click.group()
@click.option(
    "--config",
    "config_file",
    type=click.Path(dir_okay=False),
    help="YAML, JSON or key=value file with run defaults",
)
@click.option("--config-dir", type=click.Path(file_okay=False), help="Saved configuration directory")
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"], case_sensitive=False),
    help="Logging level (logs go to stderr)",
)
@click.option("--log-file", type=click.Path(dir_okay=False), help="Also log to this file")
@click.option("--json-logs", is_flag=True, default=None, help="Structured JSON log records")
@click.option(
    "--display",
    type=click.Choice(["plain", "table"]),
    default="plain",
    help="plain writes CSV/JSON artifacts; table also renders them with rich",
)
@click.pass_context
def cli(ctx, config_file, config_dir, log_level, log_file, json_logs, display):
    """Unitary Dual Lab - moments of unitary Brownian motion and its free limit.

    Solves the exact moment systems (single block and free limit on U<n>),
    simulates Brownian motion on U(nd), compares both, and checks the
    Schurmann triple of the limit process.

    Configuration priority:
    1. Command-line options
    2. UDL_* environment variables
    3. --config FILE
    4. udl.yaml in the working directory
    5. Saved configuration (~/.unitary_dual_lab/config.json)

    Examples:
        udl partitions 4
        udl moments --word "tr(u11)" --n 2 --t 1
        udl simulate --word "tr(u11)" --n 2 --d 8 --t 1 --paths 10000
        udl compare --word "tr(u u)" --n 1 --t 1 --d-list 2,4,8,16
        udl schurmann --n 2 --check gaussianity
    """
    ctx.ensure_object(dict)

    try:
        config_mgr = ConfigManager(Path(config_dir) if config_dir else None, config_file)
        config = config_mgr.load()
    except ConfigurationError as e:
        console.print(f"[red]Configuration error: {e}[/red]")
        sys.exit(1)

    setup_logging(
        log_level=log_level or config.log_level,
        log_file=Path(log_file) if log_file else None,
        json_format=config.json_logs if json_logs is None else json_logs,
    )

    ctx.obj["config_mgr"] = config_mgr
    ctx.obj["config"] = config
    ctx.obj["display"] = display
    ctx.obj["formatter"] = formatter
    ctx.obj["console"] = console


cli.add_command(partitions.partitions)
cli.add_command(moments.moments)
cli.add_command(simulate.simulate)
cli.add_command(compare.compare)
cli.add_command(schurmann.schurmann)
cli.add_command(config_cmd.config)


@cli.command()
@click.pass_context
def version(ctx):
    """Show version information."""
    from .. import __version__

    click.echo(f"Unitary Dual Lab version: {__version__}")


def main():
    """Main entry point for the CLI."""
    try:
        cli(obj={})
    except Exception as e:
        console.print(f"[red]Unexpected error: {e}[/red]")
        sys.exit(1)


if __name__ == "__main__":
    main()
