"""Certify command for hamlow."""

import click
from rich.table import Table

from ..density import DensityGrid, certify_density, family_for, family_window_check
from ..errors import InvalidParameterError, ValidationFailure
from ..hamiltonian import load_hamiltonian
from ..reports import dumps, envelope
from ..spectrum import diagonalize
from .common import (
    config_option,
    console,
    depth_reference,
    emit,
    oracle_cap_option,
    out_option,
    resolve,
)


def _summary(certificates) -> Table:
    table = Table(title="Density certificates")
    table.add_column("μ", style="cyan")
    table.add_column("δ")
    table.add_column("η")
    table.add_column("|Q|")
    table.add_column("r")
    table.add_column("log2 D", style="green")
    table.add_column("N exact")
    table.add_column("Status", style="yellow")
    for cert in certificates:
        if cert.validated is None:
            exact, verdict = "[dim]-[/dim]", "[dim]not validated[/dim]"
        else:
            exact = str(cert.validated.exact_count)
            verdict = "[green]pass[/green]" if cert.validated.passed else "[red]FAIL[/red]"
        table.add_row(
            f"{cert.mu:g}",
            f"{cert.delta:.4f}",
            f"{cert.eta:.4f}",
            str(cert.quiet_set_size),
            str(cert.r),
            f"{cert.log2_D:.3f}" if cert.log2_D is not None else "-",
            exact,
            verdict,
        )
    return table


@click.command()
@click.argument("hamiltonian", type=click.Path(exists=True, dir_okay=False))
@click.option("--d", type=int, default=None, help="Circuit depth for the reference energy E_d")
@click.option("--mu", multiple=True, type=float, help="Window factor μ (repeatable)")
@click.option("--validate", is_flag=True, help="Compare with the exact count")
@click.option("--window-check", is_flag=True, help="Check every family state's energy")
@click.option("--seed", type=int, default=None, help="Optimizer seed (d > 0)")
@click.option("--workers", type=int, default=None, help="Parallel optimizer restarts")
@oracle_cap_option
@out_option
@config_option
def certify(hamiltonian, d, mu, validate, window_check, seed, workers, oracle_cap, out_path, config_path):
    """Certify a lower bound on the number of eigenvalues below E_d + μM."""
    run = resolve(
        config_path,
        d=d,
        mu=mu,
        validate=validate or None,
        window_check=window_check or None,
        seed=seed,
        workers=workers,
        oracle_cap=oracle_cap,
        out=out_path,
    )
    mus = [float(value) for value in (run.get("mu") or [])]
    if not mus:
        raise click.UsageError("Give at least one --mu")
    for value in mus:
        if not value > 0:
            raise InvalidParameterError(f"mu must be positive, got {value}")
    depth = int(run.get("d") or 0)
    if depth < 0:
        raise InvalidParameterError(f"Depth must be non-negative, got {depth}")
    grid = DensityGrid.from_mapping(run.get("grid") or {})

    H = load_hamiltonian(hamiltonian)
    H_d, reference, bound = depth_reference(H, depth, run)

    spectrum = None
    if run.get("validate"):
        if H.n <= run["oracle_cap"]:
            spectrum = diagonalize(H_d, cap=run["oracle_cap"])
        else:
            console.print(
                f"[yellow]Skipping validation:[/yellow] n={H.n} is above the oracle cap "
                f"{run['oracle_cap']}"
            )

    certificates = [
        certify_density(
            H_d, reference, value, grid=grid, validate=spectrum is not None, spectrum=spectrum
        )
        for value in mus
    ]
    window_checks = []
    if run.get("window_check"):
        for cert in certificates:
            family = family_for(H_d, cert)
            check = family_window_check(H_d, family.quiet, family.r, reference, family.window)
            check["mu"] = cert.mu
            window_checks.append(check)

    results = {
        "n": H.n,
        "k": H.k,
        "m": H.m,
        "M": H.M,
        "L": H.L,
        "d": depth,
        "K": H_d.k,
        "reference_energy": reference,
        "depth_bound": bound.to_dict() if bound else None,
        "certificates": [cert.to_dict() for cert in certificates],
        "window_checks": window_checks,
    }
    run["grid"] = grid.to_dict()
    emit(dumps(envelope("certify", run, results)), run.get("out"))
    if run.get("out"):
        console.print(_summary(certificates))

    failed = [cert.mu for cert in certificates if cert.validated and not cert.validated.passed]
    if failed:
        raise ValidationFailure(f"Certificate exceeds the exact count for mu in {failed}")
    broken = [check["mu"] for check in window_checks if not check["pass"]]
    if broken:
        raise ValidationFailure(f"Energy window violated for mu in {broken}")
