"""Configuration management commands."""

import sys

import click
from rich.prompt import Confirm, Prompt

from ...core.exceptions import ConfigurationError


@click.group()
@click.pass_context
def config(ctx):
    """Manage saved run defaults."""
    pass


@config.command("set")
@click.option("--paths", type=int, help="Monte Carlo sample paths")
@click.option("--dt", type=float, help="Simulation step size")
@click.option("--seed", type=int, help="Master seed")
@click.option("--scheme", type=click.Choice(["geodesic", "euler-renorm"]), help="Stepping scheme")
@click.option("--workers", type=int, help="Simulation worker threads")
@click.option("--chunk-size", type=int, help="Paths advanced together")
@click.option("--max-states", type=int, help="Closure state budget of the free engine")
@click.option("--rtol", type=float, help="Propagation relative tolerance")
@click.option("--dense-crossover", type=int, help="Largest system solved by a dense exponential")
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"], case_sensitive=False),
    help="Logging level",
)
@click.pass_context
def set_values(ctx, **updates):
    """Set configuration values.

    If no options are provided, will prompt for the simulation defaults.
    """
    config_mgr = ctx.obj["config_mgr"]
    console = ctx.obj["console"]

    updates = {key: value for key, value in updates.items() if value is not None}
    if not updates:
        current = ctx.obj["config"]
        console.print("[cyan]Unitary Dual Lab Configuration Setup[/cyan]")
        updates = {
            "paths": int(Prompt.ask("Sample paths", default=str(current.paths))),
            "dt": float(Prompt.ask("Step size", default=str(current.dt))),
            "seed": int(Prompt.ask("Master seed", default=str(current.seed))),
            "scheme": Prompt.ask(
                "Scheme", choices=["geodesic", "euler-renorm"], default=current.scheme
            ),
        }

    if "log_level" in updates:
        updates["log_level"] = updates["log_level"].upper()

    try:
        config = config_mgr.update(**updates)
        config_mgr.save(config)
    except ConfigurationError as e:
        console.print(f"[red]Error saving configuration: {e}[/red]")
        sys.exit(1)
    console.print(f"[green]Configuration saved to {config_mgr.config_file}[/green]")


@config.command()
@click.pass_context
def show(ctx):
    """Show the effective configuration and where it came from."""
    config_mgr = ctx.obj["config_mgr"]
    items = dict(ctx.obj["config"].model_dump())
    items["sources"] = ", ".join(config_mgr.sources)
    items["config_file"] = str(config_mgr.config_file)
    ctx.obj["formatter"].format_summary(items, title="Current Configuration")


@config.command()
@click.option("--yes", is_flag=True, help="Do not ask for confirmation")
@click.pass_context
def clear(ctx, yes):
    """Clear saved configuration."""
    config_mgr = ctx.obj["config_mgr"]
    console = ctx.obj["console"]

    if yes or Confirm.ask("Are you sure you want to clear all configuration?", default=False):
        config_mgr.clear()
        console.print("[green]Configuration cleared[/green]")
    else:
        console.print("[yellow]Configuration not changed[/yellow]")
