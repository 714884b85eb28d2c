"""Helpers shared by the compute commands."""

import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, NoReturn, Optional, Sequence

import click
from pydantic import ValidationError

from ... import __version__
from ...config.manager import LabConfig
from ...core.exceptions import MalformedWordError, StateExplosionError
from ...formatters.manifest import RunManifest
from ...logging.metrics import get_metrics_collector
from ...moments.free_engine import FreeMomentEngine
from ...simulation.unitary_sim import SimConfig
from ...words.parser import parse_word
from ...words.trace_words import TraceTuple, normalize_time


def parse_times(t: Optional[float], times: Optional[str], default: str = "1") -> List[str]:
    """Evaluation times from ``--t`` or the comma list ``--times``.

    Raises:
        click.UsageError: If both are given or a value is not a valid time
    """
    if t is not None and times:
        raise click.UsageError("use either --t or --times, not both")
    raw: Sequence[Any] = [t] if t is not None else (times.split(",") if times else [default])
    try:
        return [normalize_time(str(value).strip()) for value in raw]
    except MalformedWordError as e:
        raise click.UsageError(str(e)) from e


def parse_word_option(word: str, n: int) -> TraceTuple:
    """Parse the --word option.

    Raises:
        click.UsageError: If the word does not parse or an index is outside 1..n
    """
    try:
        return parse_word(word, n)
    except MalformedWordError as e:
        raise click.UsageError(f"invalid --word {word!r}: {e}") from e


def parse_int_list(text: str, option: str) -> List[int]:
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise click.UsageError(f"{option} expects comma-separated integers, got {text!r}") from e
    if not values or any(v < 1 for v in values):
        raise click.UsageError(f"{option} expects positive integers, got {text!r}")
    return values


def engine_for(ctx: click.Context) -> FreeMomentEngine:
    """Free engine configured from the loaded configuration, one per invocation."""
    if "engine" not in ctx.obj:
        config: LabConfig = ctx.obj["config"]
        ctx.obj["engine"] = FreeMomentEngine(
            max_states=config.max_states, rtol=config.rtol, crossover=config.dense_crossover
        )
    return ctx.obj["engine"]


def start_manifest(
    ctx: click.Context, command: str, arguments: Dict[str, Any], seed: Optional[int] = None
) -> RunManifest:
    get_metrics_collector().reset()
    config: LabConfig = ctx.obj["config"]
    return RunManifest(
        command=command,
        arguments=arguments,
        config=config.model_dump(),
        config_sources=list(ctx.obj["config_mgr"].sources),
        seed=seed,
        code_version=__version__,
    )


def emit(
    ctx: click.Context,
    text: str,
    out: Optional[str],
    manifest: RunManifest,
    render: Optional[Callable[[], None]] = None,
) -> None:
    """Write the artifact to ``out`` (or stdout) and its manifest beside it (or to stderr).

    With ``--display table`` the ``render`` callback draws the rich view on
    stdout, replacing the plain artifact unless ``out`` is given.
    """
    table = ctx.obj["display"] == "table" and render is not None
    if table and render is not None:
        render()
    path = Path(out) if out else None
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
        manifest.outputs.append(str(path))
    elif not table:
        click.echo(text, nl=False)
        manifest.outputs.append("<stdout>")
    manifest.finish(get_metrics_collector().snapshot())
    written = manifest.write(path, stream=click.get_text_stream("stderr"))
    if written is not None:
        ctx.obj["console"].print(f"[dim]wrote {path} and {written}[/dim]")


def fail(ctx: click.Context, error: Exception, action: str) -> NoReturn:
    """Report a failed command in red and exit with status 1."""
    console = ctx.obj["console"]
    message = f"{action}: {error}"
    if isinstance(error, StateExplosionError):
        message += f" (states built: {error.states}, seed: {error.seed})"
    console.print(f"[red]{message}[/red]")
    sys.exit(1)


def sim_options(command: Callable) -> Callable:
    """Monte Carlo flags shared by ``simulate`` and ``compare``; unset flags fall back to the configuration."""
    options = [
        click.option("--paths", type=int, help="Sample paths"),
        click.option("--seed", type=int, help="Master seed"),
        click.option("--dt", type=float, help="Step size"),
        click.option("--scheme", type=click.Choice(["geodesic", "euler-renorm"]), help="Stepping scheme"),
        click.option("--workers", type=int, help="Worker threads (results do not depend on it)"),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def sim_config(ctx: click.Context, n: int, d: int, **flags: Any) -> SimConfig:
    """:class:`SimConfig` from the flags, falling back to the loaded configuration.

    Raises:
        click.UsageError: If a value violates the simulation constraints
    """
    config: LabConfig = ctx.obj["config"]
    values: Dict[str, Any] = {
        "paths": config.paths,
        "seed": config.seed,
        "dt": config.dt,
        "scheme": config.scheme,
        "workers": config.workers,
        "chunk_size": config.chunk_size,
    }
    values.update({key: value for key, value in flags.items() if value is not None})
    try:
        return SimConfig(n=n, d=d, **values)
    except ValidationError as e:
        raise click.UsageError(f"invalid simulation parameters: {e}") from e


__all__ = [
    "parse_times",
    "parse_int_list",
    "engine_for",
    "start_manifest",
    "emit",
    "fail",
    "sim_options",
    "sim_config",
]
