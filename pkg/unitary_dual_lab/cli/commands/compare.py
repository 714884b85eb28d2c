"""Monte Carlo against the free limit over several block sizes."""

import click

from ...core.exceptions import LabError
from ...formatters.output import csv_text
from ...simulation.unitary_sim import convergence_scan
from .common import (
    emit,
    engine_for,
    fail,
    parse_int_list,
    parse_word_option,
    sim_config,
    sim_options,
    start_manifest,
)

HEADER = ["d", "mc_re", "mc_im", "stderr", "free_re", "free_im", "bias", "exact_re", "exact_im"]


@click.command()
@click.option("--word", required=True, help='Trace-tuple, e.g. "tr(u u)"')
@click.option("--n", "n", type=int, default=1, show_default=True, help="Block count")
@click.option("--t", "t", type=float, help="Evaluation time (single-time words; default 1)")
@click.option("--d-list", default="2,4,8,16", show_default=True, help="Comma-separated block sizes")
@sim_options
@click.option("--out", type=click.Path(dir_okay=False), help="Write CSV to this file")
@click.pass_context
def compare(ctx, word, n, t, d_list, paths, seed, dt, scheme, workers, out):
    """Compare Monte Carlo estimates with the free value for each block size.

    Writes one CSV row per d and reports the fitted slope of log(bias)
    against log(d). For single-time n = 1 words the exact finite-d value of
    the partition system is included.

    Examples:
        udl compare --word "tr(u u)" --n 1 --t 1 --d-list 2,4,8,16 --paths 20000
        udl compare --word "tr(u12 u21)" --n 2 --d-list 32
    """
    sizes = parse_int_list(d_list, "--d-list")
    config = sim_config(
        ctx, n, sizes[0], paths=paths, seed=seed, dt=dt, scheme=scheme, workers=workers
    )
    stamped = "@" in word
    if stamped and t is not None:
        raise click.UsageError("stamped words carry their own times; drop --t")
    if t is not None and t < 0:
        raise click.UsageError(f"--t must be non-negative, got {t}")

    arguments = {"word": word, "t": t, "d_list": sizes, **config.model_dump(exclude={"d"})}
    tup = parse_word_option(word, n)
    manifest = start_manifest(ctx, "compare", arguments, seed=config.seed)
    try:
        result = convergence_scan(
            tup,
            None if stamped else (1.0 if t is None else t),
            n,
            sizes,
            paths=config.paths,
            seed=config.seed,
            dt=config.dt,
            scheme=config.scheme,
            workers=config.workers,
            chunk_size=config.chunk_size,
            engine=engine_for(ctx),
        )
    except LabError as e:
        fail(ctx, e, "Comparison failed")

    rows = [
        [
            row.d,
            row.mc_mean.real,
            row.mc_mean.imag,
            row.stderr,
            row.free_value.real,
            row.free_value.imag,
            row.bias,
            None if row.exact_value is None else row.exact_value.real,
            None if row.exact_value is None else row.exact_value.imag,
        ]
        for row in result.rows
    ]
    manifest.extra.update(
        {"word": result.word, "times": result.times, "slope": result.slope, "exact_slope": result.exact_slope}
    )

    console = ctx.obj["console"]
    if result.slope is None:
        console.print("[yellow]fitted slope: not enough rows with bias above 3 stderr[/yellow]")
    else:
        console.print(f"fitted slope: {result.slope:.4f}")
    if result.exact_slope is not None:
        console.print(f"exact finite-d slope: {result.exact_slope:.4f}")

    def render():
        ctx.obj["formatter"].format_table(HEADER, rows, title=f"{result.word} against the free limit")

    emit(ctx, csv_text(HEADER, rows), out, manifest, render)
