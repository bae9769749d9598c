"""Main CLI entry point."""

import functools
import logging
import sys
from pathlib import Path
from typing import Any, Callable

import click
from rich.console import Console
from rich.logging import RichHandler

from ..config.settings import get_settings
from ..exceptions import OscillatorError
from ..utils.export import dumps, write_json

console = Console()
logger = logging.getLogger(__name__)


def setup_logging(verbose: bool = False) -> None:
    """Set up logging with rich handler."""
    level = logging.DEBUG if verbose else logging.INFO

    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=console, rich_tracebacks=True)],
    )


def output_dir(ctx: click.Context) -> Path:
    """The run's output directory, created on first use."""
    path = Path(ctx.obj["output_dir"])
    path.mkdir(parents=True, exist_ok=True)
    return path


def reports_errors(command: Callable[..., Any]) -> Callable[..., Any]:
    """Turn workbench errors into an error record on stdout and in error.json, then exit."""

    @functools.wraps(command)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return command(*args, **kwargs)
        except OscillatorError as e:
            ctx = click.get_current_context()
            record = e.to_record()
            logger.error(f"{record['error']}: {e.message}")
            click.echo(dumps(record))
            try:
                write_json(output_dir(ctx) / "error.json", record)
            except OSError as write_error:
                logger.error(f"Could not write error.json: {write_error}")
            sys.exit(e.exit_code)

    return wrapper


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Enable verbose logging")
@click.option("-o", "--output-dir", "output", default=None, help="Directory for CSV/JSON artifacts")
@click.option("--seed", type=int, default=None, help="Seed for randomized checks")
@click.pass_context
def cli(ctx: click.Context, verbose: bool, output: str | None, seed: int | None) -> None:
    """Substrate-Depletion Oscillator Workbench

    Simulations, bifurcation sweeps, blow-up chart checks and heteroclinic
    shooting for the substrate-depletion oscillator. Every command writes
    plot-ready CSV data and a JSON summary.
    """
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    setup_logging(verbose)

    # Validate settings early
    try:
        settings = get_settings()
        ctx.obj["settings"] = settings
    except Exception as e:
        console.print(f"[red]Error loading configuration: {e}[/red]")
        console.print(
            "\n[yellow]Please check the SUBSTRATE_* environment variables and your .env file.[/yellow]"
        )
        sys.exit(3)

    ctx.obj["output_dir"] = output or settings.output_dir
    ctx.obj["seed"] = settings.seed if seed is None else seed


@cli.command()
def version() -> None:
    """Show version information."""
    console.print("[bold]Substrate-Depletion Oscillator Workbench[/bold] version 0.1.0")


# Import command modules to register them with the CLI
from . import blowup  # noqa: F401, E402
from . import diagrams  # noqa: F401, E402
from . import simulate  # noqa: F401, E402
from . import sphere  # noqa: F401, E402


if __name__ == "__main__":
    cli(obj={})
