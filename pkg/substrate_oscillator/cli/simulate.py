"""Simulation and limit-cycle CLI commands."""

import logging

import click
import numpy as np
from rich.console import Console
from rich.table import Table

from ..bifurcation.diagram import find_coexisting_cycles, gamma0_guess, no_cycle_check, relaxation_section
from ..config.params import load_model
from ..model.system import make_full_field
from ..numerics.integrate import IntegratorConfig, integrate
from ..numerics.returns import find_limit_cycle, return_map_lipschitz, trajectory_residence
from ..pws.singular_cycle import build_singular_cycle
from ..utils.export import (
    CYCLE_HEADER,
    SINGULAR_CYCLE_HEADER,
    TRAJECTORY_HEADER,
    write_csv,
    write_json,
)
from .main import cli, output_dir, reports_errors

logger = logging.getLogger(__name__)
console = Console()


@cli.command()
@click.option("--params", "params_file", required=True, type=click.Path(), help="Parameter file")
@click.option("--tmax", type=float, default=100.0, show_default=True, help="Integration time")
@click.option("--x0", type=float, default=None, help="Initial x (default: on Gamma_0's section)")
@click.option("--y0", type=float, default=None, help="Initial y")
@click.option("--samples", type=int, default=5000, show_default=True, help="Output samples")
@click.pass_context
@reports_errors
def simulate(
    ctx: click.Context,
    params_file: str,
    tmax: float,
    x0: float | None,
    y0: float | None,
    samples: int,
) -> None:
    """Integrate the full system and write the time series.

    Examples:
        substrate-oscillator simulate --params reference.txt --tmax 200
    """
    settings = ctx.obj["settings"]
    p, spec = load_model(params_file)
    p.require_smooth()
    cfg = IntegratorConfig.from_settings(settings)
    if x0 is None or y0 is None:
        start = gamma0_guess(p, relaxation_section(p))
        x0 = start[0] if x0 is None else x0
        y0 = start[1] if y0 is None else y0

    with console.status("[cyan]Integrating..."):
        traj = integrate(
            make_full_field(p, spec), (x0, y0), (0.0, tmax), cfg, t_eval=np.linspace(0.0, tmax, samples)
        )

    out = output_dir(ctx)
    write_csv(out / "trajectory.csv", TRAJECTORY_HEADER, traj.rows(), settings.float_digits)
    summary = {
        "params": p.model_dump(),
        "sigmoid": spec.label,
        "initial_state": [x0, y0],
        "final_state": traj.final_state,
        "method": traj.method,
        "nfev": traj.nfev,
        "residence_near_switch": trajectory_residence(traj),
    }
    if p.eta == 1.0 and p.mu == 0.0:
        gamma0 = build_singular_cycle(p)
        write_csv(out / "singular_cycle.csv", SINGULAR_CYCLE_HEADER, gamma0.rows(), settings.float_digits)
        summary["singular_cycle_gap"] = gamma0.closure_gap
    write_json(out / "simulate.json", summary, settings.float_digits)

    console.print(f"[green]✓[/green] {len(traj.t)} samples ({traj.method}, {traj.nfev} evaluations)")
    console.print(f"Time within 0.05 of x = 1: [bold]{summary['residence_near_switch']:.1%}[/bold]")


def _cycle_table(cycles) -> Table:
    table = Table(title="Limit cycles")
    table.add_column("#", style="cyan", justify="right")
    table.add_column("Stability", style="green")
    table.add_column("Period", justify="right")
    table.add_column("max x", justify="right")
    table.add_column("L2 norm", justify="right")
    table.add_column("Multiplier", style="magenta", justify="right")
    for i, cycle in enumerate(cycles, 1):
        table.add_row(
            str(i),
            cycle.stability,
            f"{cycle.period:.6g}",
            f"{cycle.max_x:.6g}",
            f"{cycle.l2_norm:.6g}",
            f"{cycle.multiplier:.3e}",
        )
    return table


@cli.command()
@click.option("--params", "params_file", required=True, type=click.Path(), help="Parameter file")
@click.option(
    "--reverse-time",
    is_flag=True,
    help="Also look for repelling cycles by integrating backwards in time",
)
@click.option("--settle-check", type=int, default=0, help="Random starts that must settle on equilibria")
@click.pass_context
@reports_errors
def cycle(ctx: click.Context, params_file: str, reverse_time: bool, settle_check: int) -> None:
    """Find limit cycles of the full system.

    Without --reverse-time the attracting relaxation cycle is computed from
    Gamma_0's crossing of the relaxation section. With it, every attracting
    and repelling cycle found from random and equilibrium-adjacent starts is
    reported.

    Examples:
        substrate-oscillator cycle --params reference.txt
        substrate-oscillator cycle --params three_cycles.txt --reverse-time
    """
    settings = ctx.obj["settings"]
    seed = ctx.obj["seed"]
    p, spec = load_model(params_file)
    cfg = IntegratorConfig.from_settings(settings)
    field = make_full_field(p, spec)
    out = output_dir(ctx)
    summary: dict = {"params": p.model_dump(), "sigmoid": spec.label}

    with console.status("[cyan]Searching for cycles..."):
        if reverse_time:
            cycles = find_coexisting_cycles(p, spec, cfg, seed=seed)
            summary["cycles"] = [c.summary() for c in cycles]
        else:
            section = relaxation_section(p)
            found = find_limit_cycle(field, gamma0_guess(p, section), section, cfg)
            cycles = [found]
            summary["cycles"] = [found.summary()]
            summary["lipschitz"] = return_map_lipschitz(field, found, section, cfg)
        if settle_check:
            report = no_cycle_check(p, spec, settle_check, cfg, seed=seed)
            summary["settle_check"] = report.to_record()

    for i, c in enumerate(cycles, 1):
        write_csv(out / f"cycle_{i}.csv", CYCLE_HEADER, c.rows(), settings.float_digits)
    write_json(out / "cycle.json", summary, settings.float_digits)

    if cycles:
        console.print(_cycle_table(cycles))
    else:
        console.print("[yellow]No limit cycles found[/yellow]")
    if settle_check:
        verdict = "[green]all settled[/green]" if summary["settle_check"]["all_converged"] else "[red]not all settled[/red]"
        console.print(f"Random starts: {verdict}")
