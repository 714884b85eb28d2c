"""Partition listing command."""

import click

from ...core.exceptions import LabError
from ...moments.biane import enumerate_partitions
from .common import emit, fail, start_manifest


@click.command()
@click.argument("k", type=int)
@click.option("--out", type=click.Path(dir_okay=False), help="Write the listing to this file")
@click.pass_context
def partitions(ctx, k, out):
    """List the partitions of K, one per line, followed by the total.

    Examples:
        udl partitions 4
    """
    if k < 1:
        raise click.UsageError(f"K must be at least 1, got {k}")

    manifest = start_manifest(ctx, "partitions", {"k": k})
    try:
        listing = enumerate_partitions(k)
    except LabError as e:
        fail(ctx, e, "Enumeration failed")

    lines = [str(p) for p in listing] + [f"total: {len(listing)}"]
    manifest.extra["count"] = len(listing)

    def render():
        ctx.obj["formatter"].format_table(
            ["#", "partition", "parts"],
            [[idx + 1, str(p), len(p)] for idx, p in enumerate(listing)],
            title=f"Partitions of {k} ({len(listing)} total)",
        )

    emit(ctx, "\n".join(lines) + "\n", out, manifest, render)
