"""Schurmann triple checks."""

import sys
from fractions import Fraction
from typing import Any, Dict

import click

from ...core.exceptions import LabError
from ...formatters.output import json_document
from ...schurmann.triple import base_values, crosscheck_sweep, gaussianity_check, max_difference
from .common import emit, fail, start_manifest


def _base_report(n: int) -> Dict[str, Any]:
    values = []
    violations = []
    for letter, value in base_values(n):
        expected = Fraction(-1, 2) if letter.is_diagonal else Fraction(0)
        entry = {"letter": letter.text(), "ell": str(value), "expected": str(expected)}
        values.append(entry)
        if value != expected:
            violations.append(entry)
    return {"check": "base", "n": n, "values": values, "violations": violations}


def _gaussianity_report(n: int, max_len: int) -> Dict[str, Any]:
    report = gaussianity_check(n, max_len)
    data = report.model_dump()
    data.update({"check": "gaussianity", "passed": report.passed})
    return data


def _crosscheck_report(n: int, max_len: int) -> Dict[str, Any]:
    results = crosscheck_sweep(n, max_len)
    largest = max_difference(results)
    return {
        "check": "crosscheck",
        "n": n,
        "max_len": max_len,
        "words_checked": len(results),
        "max_abs_difference": str(largest if largest is not None else Fraction(0)),
        "violations": [
            {
                "word": r.word,
                "ell": str(r.ell_value),
                "ode": str(r.ode_value),
                "difference": str(r.difference),
            }
            for r in results
            if r.difference != 0
        ],
    }


def _failed(report: Dict[str, Any]) -> bool:
    return bool(report.get("violations") or report.get("cocycle_violations")) or not report.get(
        "pi_trivial_on_kernel", True
    )


@click.command()
@click.option("--n", "n", type=int, default=2, show_default=True, help="Block count")
@click.option(
    "--check",
    type=click.Choice(["base", "gaussianity", "crosscheck"]),
    default="base",
    show_default=True,
    help="base: L on generators; gaussianity: L(abc) = 0 on the kernel; crosscheck: L against the moment ODE",
)
@click.option("--max-len", type=int, default=3, show_default=True, help="Longest product or word checked")
@click.option("--out", type=click.Path(dir_okay=False), help="Write the JSON report to this file")
@click.pass_context
def schurmann(ctx, n, check, max_len, out):
    """Check the Schurmann triple (eta, pi, L) of the free unitary Levy process.

    All values are exact rationals. Exits with status 1 when the report
    lists violations.

    Examples:
        udl schurmann --n 3 --check base
        udl schurmann --n 2 --check gaussianity --max-len 3
        udl schurmann --n 2 --check crosscheck --out crosscheck.json
    """
    if n < 1:
        raise click.UsageError(f"--n must be at least 1, got {n}")

    manifest = start_manifest(ctx, "schurmann", {"n": n, "check": check, "max_len": max_len})
    try:
        if check == "base":
            report = _base_report(n)
        elif check == "gaussianity":
            report = _gaussianity_report(n, max_len)
        else:
            report = _crosscheck_report(n, max_len)
    except LabError as e:
        fail(ctx, e, "Schurmann check failed")

    failed = _failed(report)
    manifest.extra["passed"] = not failed

    def render():
        ctx.obj["formatter"].format_json(report, title=f"Schurmann {check} check (n={n})")

    emit(ctx, json_document(report), out, manifest, render)
    if failed:
        ctx.obj["console"].print(f"[red]{check} check reported violations[/red]")
        sys.exit(1)
