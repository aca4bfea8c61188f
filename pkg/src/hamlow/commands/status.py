"""Status command for hamlow."""

import os

import click
from rich.console import Console
from rich.table import Table

from .. import __version__, config

console = Console()


def _source(key: str, stored: dict) -> str:
    if key == "oracle_cap" and os.environ.get(config.ORACLE_CAP_ENV):
        return f"[yellow]env {config.ORACLE_CAP_ENV}[/yellow]"
    if key in stored:
        return "[green]config file[/green]"
    return "[dim]default[/dim]"


@click.command()
def status():
    """Show the resolved configuration."""
    stored = config.load_config()
    resolved = config.settings()

    table = Table(title=f"hamlow {__version__} configuration")
    table.add_column("Setting", style="cyan")
    table.add_column("Value", style="green")
    table.add_column("Source", style="yellow")

    for key in config.KNOWN_KEYS:
        table.add_row(key, str(resolved[key]), _source(key, stored))

    console.print()
    console.print(table)
    console.print(f"\n[dim]Config file: {config.CONFIG_FILE}[/dim]")
