"""Simulate command for hamlow."""

import click
import numpy as np

from ..errors import InvalidParameterError
from ..filtersim import (
    MODES,
    build_extended_system,
    estimate_energy,
    estimate_in_window,
    explicit_overlap,
    maximally_entangled,
    prepare_low_energy,
)
from ..hamiltonian import load_hamiltonian
from ..reports import dumps, envelope
from ..spectrum import ground_energy, max_energy, spectral_count
from .common import (
    config_option,
    console,
    depth_reference,
    emit,
    oracle_cap_option,
    out_option,
    resolve,
    seed_of,
)

DEFAULT_SAMPLES = 10_000
DEFAULT_DEGREE = 256


def overlap_crosscheck(system, thresholds):
    """N(E)/2^n against the explicit 2n-qubit overlap at each threshold."""
    initial = maximally_entangled(system.n)
    rows = []
    for E in thresholds:
        count = spectral_count(system.spectral, E)
        explicit = explicit_overlap(system, initial, E)
        rows.append(
            {
                "E": float(E),
                "count": count,
                "gamma": count / system.dimension,
                "explicit": explicit,
                "error": abs(explicit - count / system.dimension),
            }
        )
    return rows


@click.command()
@click.argument("hamiltonian", type=click.Path(exists=True, dir_okay=False))
@click.option("--epsilon", type=float, default=None, help="Relative accuracy ε")
@click.option("--d", type=int, default=None, help="Circuit depth for the reference energy E_d")
@click.option("--mode", type=click.Choice(MODES), default=None, help="Filter: exact projector or polynomial")
@click.option("--degree", type=int, default=None, help=f"Polynomial degree (default {DEFAULT_DEGREE})")
@click.option("--samples", type=int, default=None, help=f"Samples per term (default {DEFAULT_SAMPLES})")
@click.option("--seed", type=int, default=None, help="Sampling and optimizer seed")
@click.option("--workers", type=int, default=None, help="Parallel sampling over terms")
@oracle_cap_option
@out_option
@config_option
def simulate(
    hamiltonian, epsilon, d, mode, degree, samples, seed, workers, oracle_cap, out_path, config_path
):
    """Prepare a low-energy state by filtering and estimate its energy."""
    run = resolve(
        config_path,
        epsilon=epsilon,
        d=d,
        mode=mode,
        degree=degree,
        samples=samples,
        seed=seed,
        workers=workers,
        oracle_cap=oracle_cap,
        out=out_path,
    )
    if run.get("epsilon") is None:
        raise click.UsageError("Missing --epsilon")
    eps = float(run["epsilon"])
    if not eps > 0:
        raise InvalidParameterError(f"epsilon must be positive, got {eps}")
    run.setdefault("mode", "exact")
    run.setdefault("degree", DEFAULT_DEGREE)
    run.setdefault("samples", DEFAULT_SAMPLES)
    run.setdefault("d", 0)

    H = load_hamiltonian(hamiltonian)
    system = build_extended_system(H, cap=run["oracle_cap"])
    _, reference, bound = depth_reference(H, int(run["d"]), run)

    outcome = prepare_low_energy(
        H,
        eps,
        reference,
        mode=run["mode"],
        degree=int(run["degree"]),
        system=system,
        cap=run["oracle_cap"],
    )
    estimate = estimate_energy(
        outcome, H, int(run["samples"]), seed=seed_of(run), workers=int(run.get("workers") or 1)
    )
    outcome.estimate, outcome.stderr = estimate.estimate, estimate.stderr
    lambda0 = ground_energy(system.spectral)

    thresholds = np.linspace(lambda0, max_energy(system.spectral), 5)
    results = {
        "n": H.n,
        "M": H.M,
        "d": int(run["d"]),
        "reference_energy": reference,
        "lambda0": lambda0,
        "depth_bound": bound.to_dict() if bound else None,
        "outcome": outcome.to_dict(),
        "estimate_exact": estimate.exact,
        "estimate_within_3sigma": estimate.within_3sigma,
        "estimate_in_window": estimate_in_window(
            estimate.estimate, estimate.stderr, lambda0, outcome.x
        ),
        "per_term_estimates": estimate.per_term,
        "overlap_crosscheck": overlap_crosscheck(system, [outcome.x - outcome.y, *thresholds]),
    }
    emit(dumps(envelope("simulate", run, results)), run.get("out"))
    if run.get("out"):
        console.print(
            f"[bold]γ = {outcome.gamma:.6g}[/bold]  Tr[Hρ] = {outcome.energy:.8f}  "
            f"Ê = {estimate.estimate:.6f} ± {estimate.stderr:.2g}  x = {outcome.x:.8f}"
        )
