"""Sweep command for hamlow."""

import logging
import sys
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Any, Dict, List, Sequence

import click
import numpy as np
from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TaskProgressColumn, TextColumn
from rich.table import Table

from .. import __version__, config
from ..density import DensityGrid, certify_density, family_for, family_window_check
from ..depthd import energy_zero_state
from ..errors import InvalidParameterError, ValidationFailure
from ..filtersim import build_extended_system, explicit_overlap, maximally_entangled
from ..hamiltonian import random_local_hamiltonian
from ..reports import JsonLinesSink
from ..spectrum import diagonalize, ground_energy, max_energy, spectral_count
from .common import config_option, oracle_cap_option, resolve, seed_of

CHECKS = ("certify", "window", "overlap")
OVERLAP_TOL = 1e-12
OVERLAP_THRESHOLDS = 5

logger = logging.getLogger(__name__)
progress_console = Console(stderr=True)


def plan_instances(
    ns: Sequence[int], k: int, m_factors: Sequence[int], per_size: int, seed: int
) -> List[Dict[str, Any]]:
    """Instance descriptors in a fixed order; ``id`` is the position in that order."""
    plan = []
    for n in ns:
        for factor in m_factors:
            for _ in range(per_size):
                plan.append({"id": len(plan), "n": n, "k": k, "m": factor * n, "seed": seed})
    return plan


def run_instance(
    spec: Dict[str, Any], mus: Sequence[float], checks: Sequence[str], oracle_cap: int
) -> Dict[str, Any]:
    """Generate one instance and run the requested checks on it end to end."""
    rng = np.random.default_rng([spec["seed"], spec["id"]])
    H = random_local_hamiltonian(spec["n"], spec["k"], spec["m"], rng)
    record: Dict[str, Any] = dict(spec)
    record.update({"M": H.M, "L": H.L, "checks": {}})
    e0 = energy_zero_state(H)
    spectrum = diagonalize(H, cap=oracle_cap)
    ok = True

    if "certify" in checks or "window" in checks:
        certificates = [
            certify_density(H, e0, mu, grid=DensityGrid(), validate=True, spectrum=spectrum)
            for mu in mus
        ]
        if "certify" in checks:
            record["checks"]["certify"] = [
                {
                    "mu": cert.mu,
                    "D": cert.lower_bound_D,
                    "exact_count": cert.validated.exact_count,
                    "pass": cert.validated.passed,
                }
                for cert in certificates
            ]
            ok &= all(cert.validated.passed for cert in certificates)
        if "window" in checks:
            windows = []
            for cert in certificates:
                family = family_for(H, cert)
                check = family_window_check(H, family.quiet, family.r, e0, family.window)
                windows.append({key: check[key] for key in ("checked", "max_shift", "window", "pass")})
                windows[-1]["mu"] = cert.mu
            record["checks"]["window"] = windows
            ok &= all(entry["pass"] for entry in windows)

    if "overlap" in checks and 2 * H.n <= config.get_vector_cap():
        system = build_extended_system(H, cap=oracle_cap)
        initial = maximally_entangled(H.n)
        worst = 0.0
        energies = np.linspace(ground_energy(spectrum), max_energy(spectrum), OVERLAP_THRESHOLDS)
        for E in energies:
            gamma = spectral_count(system.spectral, E) / system.dimension
            worst = max(worst, abs(explicit_overlap(system, initial, E) - gamma))
        record["checks"]["overlap"] = {
            "thresholds": len(energies),
            "max_error": worst,
            "pass": worst <= OVERLAP_TOL,
        }
        ok &= worst <= OVERLAP_TOL

    record["pass"] = bool(ok)
    return record


@click.command()
@click.option("--n", "ns", multiple=True, type=int, help="Qubit counts (repeatable; default 6 8 10)")
@click.option("--k", type=int, default=None, help="Locality (default 3)")
@click.option("--m-factor", "m_factors", multiple=True, type=int, help="m = factor·n (default 1 2)")
@click.option("--instances", type=int, default=None, help="Instances per (n, m) (default 10)")
@click.option("--mu", "mus", multiple=True, type=float, help="Window factors (default 0.1 0.3 0.5)")
@click.option("--check", "checks", multiple=True, type=click.Choice(CHECKS), help="Checks to run")
@click.option("--seed", type=int, default=None, help="Base seed")
@click.option("--workers", type=int, default=None, help="Worker threads")
@oracle_cap_option
@click.option("--out", "out_path", default=None, help="JSON-lines output (default stdout)")
@config_option
def sweep(ns, k, m_factors, instances, mus, checks, seed, workers, oracle_cap, out_path, config_path):
    """Run the soundness checks over many random instances."""
    run = resolve(
        config_path,
        n=ns,
        k=k,
        m_factor=m_factors,
        instances=instances,
        mu=mus,
        check=checks,
        seed=seed,
        workers=workers,
        oracle_cap=oracle_cap,
        out=out_path,
    )
    run.setdefault("n", [6, 8, 10])
    run.setdefault("k", 3)
    run.setdefault("m_factor", [1, 2])
    run.setdefault("instances", 10)
    run.setdefault("mu", [0.1, 0.3, 0.5])
    run.setdefault("check", list(CHECKS))
    run["workers"] = int(run.get("workers") or config.get_workers())
    if run["workers"] < 1:
        raise InvalidParameterError(f"workers must be positive, got {run['workers']}")

    plan = plan_instances(
        run["n"], int(run["k"]), run["m_factor"], int(run["instances"]), seed_of(run)
    )
    stream = open(run["out"], "w", encoding="utf-8") if run.get("out") else sys.stdout
    sink = JsonLinesSink(stream)
    sink.write({"tool": "hamlow", "version": __version__, "command": "sweep", "config": run})
    failures = []
    try:
        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            TaskProgressColumn(),
            console=progress_console,
        ) as progress:
            task = progress.add_task("Checking instances...", total=len(plan))
            with ThreadPoolExecutor(max_workers=run["workers"]) as pool:
                futures = {
                    pool.submit(
                        run_instance, spec, run["mu"], run["check"], run["oracle_cap"]
                    ): spec["id"]
                    for spec in plan
                }
                for future in as_completed(futures):
                    try:
                        record = future.result()
                    except Exception as exc:
                        instance_id = futures[future]
                        logger.error("Instance %d failed: %s", instance_id, exc)
                        record = {
                            "id": instance_id,
                            "error": f"{type(exc).__name__}: {exc}",
                            "pass": False,
                        }
                    sink.write(record)
                    if not record["pass"]:
                        failures.append(record["id"])
                    progress.advance(task)
    finally:
        if stream is not sys.stdout:
            stream.close()

    summary = Table(title="Sweep")
    summary.add_column("Instances", style="cyan")
    summary.add_column("Failures", style="red" if failures else "green")
    summary.add_row(str(len(plan)), str(len(failures)))
    progress_console.print(summary)
    if failures:
        raise ValidationFailure(f"{len(failures)} instance(s) failed: {sorted(failures)}")
