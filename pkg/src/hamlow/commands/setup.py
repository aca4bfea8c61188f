"""Setup command for hamlow."""

import click
from rich.console import Console

from .. import config

console = Console()


@click.command()
def setup():
    """Configure default caps, workers and seed."""
    console.print("\n[bold cyan]hamlow setup[/bold cyan]")
    console.print(f"[dim]Settings are stored in {config.CONFIG_FILE}[/dim]\n")

    current = config.load_config()
    oracle_cap = click.prompt(
        "Oracle cap (largest n for dense 2^n x 2^n matrices)",
        type=click.IntRange(min=1),
        default=current.get("oracle_cap", config.DEFAULT_ORACLE_CAP),
    )
    vector_cap = click.prompt(
        "Vector cap (largest total qubit count for statevectors)",
        type=click.IntRange(min=2),
        default=current.get("vector_cap", config.DEFAULT_VECTOR_CAP),
    )
    workers = click.prompt(
        "Worker threads",
        type=click.IntRange(min=1),
        default=current.get("workers", config.DEFAULT_WORKERS),
    )
    seed = click.prompt(
        "Default seed", type=int, default=current.get("seed", config.DEFAULT_SEED)
    )

    for key, value in (
        ("oracle_cap", oracle_cap),
        ("vector_cap", vector_cap),
        ("workers", workers),
        ("seed", seed),
    ):
        config.set_value(key, value)

    console.print("\n[bold green]Setup complete![/bold green]")
    console.print("Run 'hamlow status' to review the resolved settings.")
