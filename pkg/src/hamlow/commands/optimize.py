"""Optimize-depth command for hamlow."""

import json

import click

from ..depthd import energy_zero_state, optimize_depth_d, parse_circuit
from ..errors import ValidationFailure
from ..hamiltonian import load_hamiltonian
from ..reports import dumps, envelope
from ..spectrum import diagonalize, ground_energy
from .common import (
    config_option,
    console,
    emit,
    optimizer_config,
    oracle_cap_option,
    out_option,
    resolve,
)

SANDWICH_TOL = 1e-9


@click.command("optimize-depth")
@click.argument("hamiltonian", type=click.Path(exists=True, dir_okay=False))
@click.option("--d", type=int, default=None, help="Circuit depth")
@click.option("--seed", type=int, default=None, help="Seed for the random restarts")
@click.option("--restarts", type=int, default=None, help="Number of restarts (identity first)")
@click.option("--sweeps", type=int, default=None, help="Coordinate-descent sweeps per restart")
@click.option("--plateau", type=float, default=None, help="Stop when a sweep gains less")
@click.option("--workers", type=int, default=None, help="Parallel restarts")
@click.option(
    "--initial",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="Circuit JSON to seed restart 0 (padded with identity layers)",
)
@click.option("--validate", is_flag=True, help="Check λ0 ≤ bound ≤ E_0 by diagonalization")
@oracle_cap_option
@out_option
@config_option
def optimize_depth(
    hamiltonian, d, seed, restarts, sweeps, plateau, workers, initial, validate,
    oracle_cap, out_path, config_path,
):
    """Find a variational upper bound on E_d with a brickwork circuit."""
    run = resolve(
        config_path,
        d=d,
        seed=seed,
        restarts=restarts,
        sweeps=sweeps,
        plateau=plateau,
        workers=workers,
        initial=initial,
        validate=validate or None,
        oracle_cap=oracle_cap,
        out=out_path,
    )
    if run.get("d") is None:
        raise click.UsageError("Missing --d")
    depth = int(run["d"])
    H = load_hamiltonian(hamiltonian)
    cfg = optimizer_config(run)
    seeded = None
    if run.get("initial"):
        with open(run["initial"], "r", encoding="utf-8") as f:
            document = json.load(f)
        # a previous optimize-depth report works as well as a bare circuit
        if "results" in document:
            document = document["results"]["circuit"]
        seeded = parse_circuit(document)

    with console.status(f"[bold]Optimizing depth-{depth} circuit...[/bold]"):
        bound = optimize_depth_d(H, depth, cfg, initial=seeded, cap=run["oracle_cap"])
    e0 = energy_zero_state(H)

    run["optimizer"] = cfg.to_dict()
    results = {"E_0": e0, "lambda0": None, **bound.to_dict()}
    if run.get("validate"):
        lambda0 = ground_energy(diagonalize(H, cap=run["oracle_cap"]))
        results["lambda0"] = lambda0
        if not lambda0 - SANDWICH_TOL <= bound.energy_upper <= e0 + SANDWICH_TOL:
            emit(dumps(envelope("optimize-depth", run, results)), run.get("out"))
            raise ValidationFailure(
                f"Bound {bound.energy_upper} outside [λ0={lambda0}, E_0={e0}]"
            )

    emit(dumps(envelope("optimize-depth", run, results)), run.get("out"))
    if run.get("out"):
        console.print(
            f"[bold]E_{depth} ≤ {bound.energy_upper:.10f}[/bold]  "
            f"(E_0 = {e0:.10f}, restart {bound.restart})"
        )
