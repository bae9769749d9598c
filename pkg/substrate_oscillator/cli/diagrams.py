"""Bifurcation diagram and regime classification CLI commands."""

import logging

import click
from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn
from rich.table import Table

from ..bifurcation.diagram import sweep_eta
from ..bifurcation.regime import classify_regime, mu_negative_scenario
from ..config.params import gamma_from_file, load_model, model_from_file, read_parameter_file
from ..exceptions import ConfigError
from ..numerics.integrate import IntegratorConfig
from ..sphere.shooting import het_curve_from_table
from ..utils.export import DIAGRAM_HEADER, read_het_csv, write_csv, write_json
from .main import cli, output_dir, reports_errors

logger = logging.getLogger(__name__)
console = Console()


@cli.command()
@click.option("--params", "params_file", required=True, type=click.Path(), help="Parameter file")
@click.option("--eta-min", type=float, required=True, help="Lower end of the eta range")
@click.option("--eta-max", type=float, required=True, help="Upper end of the eta range")
@click.option("--n", "n", type=int, default=300, show_default=True, help="Grid points (at least 10)")
@click.option("--no-cycles", is_flag=True, help="Skip the cycle branch")
@click.pass_context
@reports_errors
def bifurcate(
    ctx: click.Context, params_file: str, eta_min: float, eta_max: float, n: int, no_cycles: bool
) -> None:
    """Sweep eta: equilibria, Hopf points and the attracting cycle branch.

    Examples:
        substrate-oscillator bifurcate --params reference.txt --eta-min 0.9 --eta-max 1.05
    """
    settings = ctx.obj["settings"]
    if n < 10:
        raise ConfigError(f"--n must be at least 10, got {n}")
    if eta_max <= eta_min:
        raise ConfigError(f"empty eta range [{eta_min:g}, {eta_max:g}]")
    p, spec = load_model(params_file)
    cfg = IntegratorConfig.from_settings(settings)

    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        console=console,
    ) as progress:
        task = progress.add_task("[cyan]Sweeping eta...", total=n)
        diagram = sweep_eta(
            p,
            spec,
            (eta_min, eta_max),
            n,
            cfg,
            cycles=not no_cycles,
            on_step=lambda eta: progress.update(task, advance=1, description=f"[cyan]eta = {eta:.5f}"),
        )

    out = output_dir(ctx)
    write_csv(out / "diagram.csv", DIAGRAM_HEADER, diagram.rows(), settings.float_digits)
    write_json(
        out / "diagram.json",
        {"params": p.model_dump(), "sigmoid": spec.label, **diagram.summary()},
        settings.float_digits,
    )

    table = Table(title="Hopf points")
    table.add_column("#", style="cyan", justify="right")
    table.add_column("eta", style="magenta", justify="right")
    for i, eta in enumerate(diagram.hopf_points, 1):
        table.add_row(str(i), f"{eta:.8g}")
    console.print(table)
    if diagram.warnings:
        console.print(f"[yellow]Cycle search failed at {len(diagram.warnings)} grid point(s)[/yellow]")


@cli.command()
@click.option("--params", "params_file", required=True, type=click.Path(), help="Parameter file")
@click.option("--het", "het_file", type=click.Path(), default=None, help="Heteroclinic-curve CSV")
@click.pass_context
@reports_errors
def classify(ctx: click.Context, params_file: str, het_file: str | None) -> None:
    """Predict and check existence of relaxation oscillations.

    A file with scaled parameters (eps, mu1, eta1) is classified against the
    heteroclinic curves in --het. A file with mu < 0 runs the blended-system
    scenario instead.

    Examples:
        substrate-oscillator classify --params scaled.txt --het output/het_curve.csv
        substrate-oscillator classify --params negative_mu.txt
    """
    settings = ctx.obj["settings"]
    cfg = IntegratorConfig.from_settings(settings)
    contents = read_parameter_file(params_file)
    out = output_dir(ctx)

    if contents.scaled:
        if het_file is None:
            raise ConfigError("scaled parameters need --het")
        contents.require("eps")
        gamma = gamma_from_file(contents)
        _, spec = model_from_file(contents)
        het = het_curve_from_table(gamma, *read_het_csv(het_file))
        with console.status("[cyan]Classifying..."):
            verdict = classify_regime(
                float(contents.eps),
                float(contents.mu1 or 0),
                float(contents.eta1 or 0),
                gamma,
                het,
                spec,
                cfg,
                settings,
            )
        write_json(out / "classify.json", verdict.to_record(), settings.float_digits)
        colour = "green" if verdict.agree else "red"
        console.print(f"Predicted: [bold]{verdict.predicted}[/bold]")
        console.print(f"Observed:  [bold {colour}]{verdict.observed}[/bold {colour}]")
        if verdict.inconclusive:
            console.print("[yellow]Inconclusive: too close to a heteroclinic value[/yellow]")
        return

    p, spec = model_from_file(contents)
    if p.mu >= 0:
        raise ConfigError("give scaled parameters (mu1, eta1) or a model with mu < 0")
    with console.status("[cyan]Simulating the blended system..."):
        report = mu_negative_scenario(p, spec, cfg, settings=settings)
    write_json(out / "classify.json", report.to_record(), settings.float_digits)
    console.print(f"Attracting cycles: [bold]{report.all_attracting}[/bold]")
    console.print(f"Distance to the singular cycle shrinking: [bold]{report.shrinking}[/bold]")
