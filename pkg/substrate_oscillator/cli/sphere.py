"""Sphere analysis CLI commands: Hopf checks and heteroclinic curves."""

import logging

import click
from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn
from rich.table import Table

from ..blowup.charts import ScaledParams
from ..config.params import load_gamma
from ..sphere.duality import het_hopf_ordering, right_het_via_left, sphere_cycle_probe
from ..sphere.equilibria import catalog_equilibria
from ..sphere.hopf import hopf_value
from ..sphere.melnikov import melnikov_check
from ..sphere.nullclines import nullcline_folds
from ..sphere.shooting import build_het_curve, shoot_heteroclinic
from ..utils.export import CONNECTION_HEADER, HET_HEADER, write_csv, write_json
from .main import cli, output_dir, reports_errors

logger = logging.getLogger(__name__)
console = Console()


@cli.command("hopf-check")
@click.option("--gamma", "gamma_file", required=True, type=click.Path(), help="Sphere parameter file")
@click.option("--side", type=click.Choice(["L", "R"]), required=True, help="Sphere")
@click.option("--mu1", type=float, default=0.0, show_default=True, help="Scaled mu")
@click.option("--eta1", type=float, default=None, help="Also catalogue the sphere equilibria at this eta1")
@click.option("--probe", is_flag=True, help="Look for the repelling cycle next to the Hopf point")
@click.pass_context
@reports_errors
def hopf_check(
    ctx: click.Context, gamma_file: str, side: str, mu1: float, eta1: float | None, probe: bool
) -> None:
    """Compare the closed-form Hopf value of z with the trace-zero root.

    Examples:
        substrate-oscillator hopf-check --gamma gamma.txt --side L
        substrate-oscillator hopf-check --gamma gamma.txt --side R --eta1 0.5 --probe
    """
    settings = ctx.obj["settings"]
    gamma = load_gamma(gamma_file)
    result = hopf_value(side, mu1, gamma)
    record: dict = {"gamma": gamma.model_dump(), "mu1": mu1, "hopf": result.to_record()}
    record["hopf"]["difference"] = abs(result.eta_H - result.eta_H_numeric)

    if eta1 is not None:
        sp = ScaledParams(eta1=eta1, mu1=mu1)
        equilibria = catalog_equilibria(side, sp, gamma)
        record["equilibria"] = [eq.to_record() for eq in equilibria]
        if side == "L":
            record["nullcline_folds"] = nullcline_folds(sp, gamma).to_record()
    if probe:
        record["probe"] = sphere_cycle_probe(side, gamma, settings=settings).to_record()

    write_json(output_dir(ctx) / f"hopf_{side}.json", record, settings.float_digits)

    console.print(f"\n[bold]Hopf point of z on sphere {side}[/bold] (mu1 = {mu1:g})\n")
    console.print(f"[green]Closed form:[/green] {result.eta_H:.12g}")
    console.print(f"[green]Numeric:[/green]     {result.eta_H_numeric:.12g}")
    console.print(f"[green]Difference:[/green]  {record['hopf']['difference']:.3e}")
    kind = "sub-critical" if result.lyapunov_sign > 0 else "super-critical"
    console.print(f"[green]Lyapunov sign:[/green] {result.lyapunov_sign:+d} ({kind})")

    if eta1 is not None:
        table = Table(title=f"Sphere {side} equilibria at eta1 = {eta1:g}")
        table.add_column("Label", style="cyan")
        table.add_column("Chart")
        table.add_column("Coordinates", justify="right")
        table.add_column("Type", style="magenta")
        for eq in equilibria:
            coords = ", ".join(f"{c:.6g}" for c in eq.coords)
            table.add_row(eq.label, str(eq.chart), coords, eq.classification)
        console.print(table)
    if probe:
        found = record["probe"]["detected"]
        console.print(f"Repelling cycle near z: {'[green]found[/green]' if found else '[yellow]not found[/yellow]'}")


@cli.command("het-curve")
@click.option("--gamma", "gamma_file", required=True, type=click.Path(), help="Sphere parameter file")
@click.option("--mu1-max", type=float, default=1.2, show_default=True, help="Last mu1 of the grid")
@click.option("--n", "n", type=int, default=7, show_default=True, help="Grid points")
@click.option("--tol", type=float, default=None, help="Shooting tolerance in eta1")
@click.option("--checks", is_flag=True, help="Melnikov sign, duality and Hopf ordering at mu1 = 0")
@click.pass_context
@reports_errors
def het_curve(
    ctx: click.Context, gamma_file: str, mu1_max: float, n: int, tol: float | None, checks: bool
) -> None:
    """Shoot the heteroclinic values eta_Het^L and eta_Het^R over a mu1 grid.

    Examples:
        substrate-oscillator het-curve --gamma gamma.txt --mu1-max 1.2 --n 7
    """
    settings = ctx.obj["settings"]
    gamma = load_gamma(gamma_file)

    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        console=console,
    ) as progress:
        task = progress.add_task("[cyan]Shooting...", total=n)
        curve = build_het_curve(
            gamma,
            mu1_max,
            n,
            tol,
            settings,
            on_point=lambda mu1: progress.update(task, advance=1, description=f"[cyan]mu1 = {mu1:.4g}"),
        )

    out = output_dir(ctx)
    write_csv(out / "het_curve.csv", HET_HEADER, curve.rows(), settings.float_digits)
    summary: dict = {"gamma": gamma.model_dump(), **curve.summary()}

    if checks:
        with console.status("[cyan]Checking the left connection..."):
            left = shoot_heteroclinic("L", 0.0, gamma, tol, settings)
            write_csv(
                out / "connection_L.csv",
                CONNECTION_HEADER,
                [(t, u[0], u[1]) for t, u in zip(left.times, left.orbit)],
                settings.float_digits,
            )
            melnikov = melnikov_check(left.orbit, ScaledParams(eta1=left.eta_het), gamma, left.times)
            summary["melnikov"] = melnikov.to_record()
            summary["right_via_left"] = right_het_via_left(0.0, gamma, tol, settings)
            summary["het_hopf_ordering"] = het_hopf_ordering(
                gamma, 0.0, float(curve.etaL_het[0]), float(curve.etaR_het[0]), settings
            )
    write_json(out / "het_curve.json", summary, settings.float_digits)

    table = Table(title="Heteroclinic values")
    table.add_column("mu1", style="cyan", justify="right")
    table.add_column("eta_Het^L", style="green", justify="right")
    table.add_column("eta_Het^R", style="magenta", justify="right")
    for mu1, a, b in curve.rows():
        table.add_row(f"{mu1:.4g}", f"{a:.8g}", f"{b:.8g}")
    console.print(table)
    console.print(f"mu1* = [bold]{curve.mu1_star:.6g}[/bold]")
    if checks:
        console.print(f"Melnikov integral sign: [bold]{summary['melnikov']['integral_sign']:+d}[/bold]")
