"""Entry point for python -m substrate_oscillator."""

from substrate_oscillator.cli.main import cli

if __name__ == "__main__":
    cli(obj={})
