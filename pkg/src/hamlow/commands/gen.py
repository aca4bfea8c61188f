"""Gen command for hamlow."""

import json

import click
import numpy as np

from ..hamiltonian import WEIGHT_DISTRIBUTIONS, hamiltonian_to_document, random_local_hamiltonian
from .common import config_option, console, emit, out_option, resolve, seed_of


@click.command()
@click.option("--n", type=int, default=None, help="Number of qubits")
@click.option("--k", type=int, default=None, help="Locality (support of every term)")
@click.option("--m", type=int, default=None, help="Number of terms")
@click.option("--weights", type=click.Choice(WEIGHT_DISTRIBUTIONS), default=None, help="Weight distribution")
@click.option("--seed", type=int, default=None, help="Random seed")
@out_option
@config_option
def gen(n, k, m, weights, seed, out_path, config_path):
    """Generate a random k-local Hamiltonian."""
    run = resolve(config_path, n=n, k=k, m=m, weights=weights, seed=seed, out=out_path)
    missing = [name for name in ("n", "k", "m") if run.get(name) is None]
    if missing:
        raise click.UsageError(f"Missing {', '.join('--' + name for name in missing)}")

    rng = np.random.default_rng(seed_of(run))
    H = random_local_hamiltonian(
        int(run["n"]), int(run["k"]), int(run["m"]), rng, weights=run.get("weights") or "pm1"
    )
    emit(json.dumps(hamiltonian_to_document(H), sort_keys=True, indent=2) + "\n", run.get("out"))
    if run.get("out"):
        console.print(
            f"[bold]n={H.n} k={H.k} m={H.m}[/bold]  M={H.M:g}  L={H.L:g}"
        )
