"""Exact moment command."""

from typing import List, Tuple

import click

from ...core.exceptions import LabError
from ...formatters.output import csv_text
from ...moments.biane import Regime, tuple_moment
from ...words.parser import format_tuple
from .common import emit, engine_for, fail, parse_times, parse_word_option, start_manifest

HEADER = ["time", "re", "im"]


@click.command()
@click.option("--word", required=True, help='Trace-tuple, e.g. "tr(u11 u22*); tr(u12)"')
@click.option("--n", "n", type=int, default=1, show_default=True, help="Block count")
@click.option("--t", "t", type=float, help="Evaluation time")
@click.option("--times", help="Comma-separated evaluation times")
@click.option(
    "--mode",
    type=click.Choice(["free", "biane-finite", "biane-limit"]),
    default="free",
    show_default=True,
    help="free engine on U<n>, or the n = 1 partition system at block size d / in the limit",
)
@click.option("--d", "d", type=int, help="Block size for --mode biane-finite")
@click.option("--out", type=click.Path(dir_okay=False), help="Write CSV to this file")
@click.pass_context
def moments(ctx, word, n, t, times, mode, d, out):
    """Exact moments of a word, one CSV row (time, re, im) per time.

    Words whose letters carry @ stamps are evaluated at their own times and
    give a single row at the latest time.

    Examples:
        udl moments --word "tr(u11)" --n 2 --t 1
        udl moments --word "tr(u u)" --times 0.5,1,2 --mode biane-finite --d 4
        udl moments --word "tr(u11@0.5 u11@1)"
    """
    if n < 1:
        raise click.UsageError(f"--n must be at least 1, got {n}")
    if mode != "free" and n != 1:
        raise click.UsageError(f"--mode {mode} only describes n = 1")
    if mode == "biane-finite" and (d is None or d < 1):
        raise click.UsageError("--mode biane-finite needs --d >= 1")
    stamped = "@" in word
    if stamped and (t is not None or times):
        raise click.UsageError("stamped words carry their own times; drop --t/--times")
    evaluation_times = [] if stamped else parse_times(t, times)

    arguments = {"word": word, "n": n, "times": evaluation_times, "mode": mode, "d": d}
    tup = parse_word_option(word, n)
    manifest = start_manifest(ctx, "moments", arguments)
    rows: List[Tuple[str, float, float]] = []
    try:
        if stamped:
            schedule = [(tup.times[-1], tup)]
        else:
            schedule = [(time, tup.with_times([time])) for time in evaluation_times]

        engine = engine_for(ctx)
        for time, stamped_tup in schedule:
            if mode == "free":
                value = engine.evaluate(stamped_tup, n)
            else:
                regime = Regime.finite(d) if mode == "biane-finite" else Regime.limit()
                value = tuple_moment(stamped_tup, float(stamped_tup.times[0]), regime)
            rows.append((time, value.real, value.imag))
    except LabError as e:
        fail(ctx, e, "Moment computation failed")

    manifest.extra["word"] = format_tuple(tup, stamps=True)
    manifest.extra["memo_size"] = engine.memo_size

    def render():
        ctx.obj["formatter"].format_table(HEADER, rows, title=f"{format_tuple(tup)} ({mode}, n={n})")

    emit(ctx, csv_text(HEADER, rows), out, manifest, render)
