"""Blow-up verification CLI command."""

import logging

import click
from rich.console import Console
from rich.table import Table

from ..blowup.consistency import verify_blowup
from ..exceptions import NumericalError
from ..utils.export import RESIDUAL_HEADER, write_csv, write_json
from .main import cli, output_dir, reports_errors

logger = logging.getLogger(__name__)
console = Console()

RESIDUAL_TOL = 1e-8


@cli.command("blowup-verify")
@click.option("--k", "k", type=int, default=1, show_default=True, help="Decay order of the sigmoid")
@click.option("--samples", type=int, default=100, show_default=True, help="Interior samples per chart")
@click.pass_context
@reports_errors
def blowup_verify(ctx: click.Context, k: int, samples: int) -> None:
    """Check every chart field against the pushforward of the global field.

    Fails with exit code 2 when any residual exceeds 1e-8.

    Examples:
        substrate-oscillator blowup-verify --k 2
    """
    settings = ctx.obj["settings"]
    with console.status("[cyan]Sampling charts..."):
        rows = verify_blowup(k=k, n_samples=samples, seed=ctx.obj["seed"])

    out = output_dir(ctx)
    write_csv(out / "blowup_residuals.csv", RESIDUAL_HEADER, [r.as_row() for r in rows], settings.float_digits)
    worst = max(r.max_residual for r in rows)
    write_json(
        out / "blowup_verify.json",
        {"k": k, "samples": samples, "max_residual": worst, "tolerance": RESIDUAL_TOL},
        settings.float_digits,
    )

    table = Table(title=f"Pushforward residuals (k = {k})")
    table.add_column("Stage", style="cyan")
    table.add_column("Chart", style="green")
    table.add_column("Max residual", justify="right")
    for r in rows:
        style = "red" if r.max_residual > RESIDUAL_TOL else "white"
        table.add_row(r.stage, r.chart, f"[{style}]{r.max_residual:.3e}[/{style}]")
    console.print(table)

    failed = [r for r in rows if r.max_residual > RESIDUAL_TOL]
    if failed:
        names = ", ".join(f"{r.stage}/{r.chart}" for r in failed)
        raise NumericalError(f"pushforward residual above {RESIDUAL_TOL:g} on {names}")
    console.print("[bold green]All charts consistent[/bold green]")
