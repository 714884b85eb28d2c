"""Monte Carlo estimation command."""

import click

from ...core.exceptions import LabError
from ...formatters.output import json_lines
from ...simulation.unitary_sim import estimate_moments
from ...words.parser import format_tuple
from .common import (
    emit,
    fail,
    parse_times,
    parse_word_option,
    sim_config,
    sim_options,
    start_manifest,
)


@click.command()
@click.option("--word", required=True, help='Trace-tuple, e.g. "tr(u11)"')
@click.option("--n", "n", type=int, default=1, show_default=True, help="Block count")
@click.option("--d", "d", type=int, required=True, help="Block size")
@click.option("--t", "t", type=float, help="Evaluation time")
@click.option("--times", help="Comma-separated evaluation times")
@sim_options
@click.option("--out", type=click.Path(dir_okay=False), help="Write JSON records to this file")
@click.pass_context
def simulate(ctx, word, n, d, t, times, paths, seed, dt, scheme, workers, out):
    """Monte Carlo estimate of a word on U(nd), one JSON record per time.

    All times are estimated on the same sample paths. Stamped words give a
    single record at their own times.

    Examples:
        udl simulate --word "tr(u11)" --n 2 --d 8 --t 1 --paths 10000
        udl simulate --word "tr(u u)" --d 4 --times 0.5,1,2 --seed 7
    """
    config = sim_config(ctx, n, d, paths=paths, seed=seed, dt=dt, scheme=scheme, workers=workers)
    stamped = "@" in word
    if stamped and (t is not None or times):
        raise click.UsageError("stamped words carry their own times; drop --t/--times")
    evaluation_times = [] if stamped else parse_times(t, times)

    arguments = {"word": word, "times": evaluation_times, **config.model_dump()}
    tup = parse_word_option(word, n)
    manifest = start_manifest(ctx, "simulate", arguments, seed=config.seed)
    try:
        tuples = [tup] if stamped else [tup.with_times([time]) for time in evaluation_times]
        estimates = estimate_moments(tuples, config)
    except LabError as e:
        fail(ctx, e, "Simulation failed")

    label = format_tuple(tup, stamps=stamped)
    records = [
        estimate.to_record(label, config, stamped_tup.times)
        for estimate, stamped_tup in zip(estimates, tuples)
    ]

    def render():
        ctx.obj["formatter"].format_table(
            ["time", "mean_re", "mean_im", "stderr", "paths"],
            [
                [stamped_tup.times[-1], r["mean_re"], r["mean_im"], r["stderr"], r["paths"]]
                for r, stamped_tup in zip(records, tuples)
            ],
            title=f"{label} on U({config.dimension}), d={d}",
        )

    emit(ctx, json_lines(records), out, manifest, render)
