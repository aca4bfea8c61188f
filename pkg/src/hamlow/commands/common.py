"""Options and helpers shared by the run commands."""

from typing import Any, Dict, Mapping, Optional, Tuple

import click
from rich.console import Console

from .. import config
from ..depthd import DepthBound, OptimizerConfig, energy_zero_state, optimize_depth_d
from ..hamiltonian import LocalHamiltonian, conjugate_by_circuit
from ..reports import write_text

console = Console()


def config_option(f):
    return click.option(
        "--config",
        "config_path",
        default=None,
        type=click.Path(exists=True, dir_okay=False),
        help="JSON or YAML run config; explicit flags win",
    )(f)


def oracle_cap_option(f):
    return click.option(
        "--oracle-cap",
        default=None,
        type=int,
        help=f"Largest n for dense matrices (env {config.ORACLE_CAP_ENV})",
    )(f)


def out_option(f):
    return click.option("--out", "out_path", default=None, help="Output file (default stdout)")(f)


def resolve(config_path: Optional[str], **flags: Any) -> Dict[str, Any]:
    """Run config from ``--config`` merged with the flags that were given."""
    resolved = config.resolve_run_config(config.load_run_config(config_path), flags)
    resolved["oracle_cap"] = config.get_oracle_cap(resolved.get("oracle_cap"))
    return resolved


def optimizer_config(run: Mapping[str, Any]) -> OptimizerConfig:
    """Optimizer settings from a run config, under ``optimizer`` or at top level."""
    data = dict(run.get("optimizer") or {})
    for key in ("restarts", "sweeps", "plateau", "workers"):
        if run.get(key) is not None:
            data[key] = run[key]
    data.setdefault("seed", seed_of(run))
    data.setdefault("workers", config.get_workers())
    return OptimizerConfig.from_mapping(data)


def depth_reference(
    H: LocalHamiltonian, d: int, run: Mapping[str, Any]
) -> Tuple[LocalHamiltonian, float, Optional[DepthBound]]:
    """(H_d, ⟨0|H_d|0⟩, bound) with H_d = H for d = 0 and the optimized circuit otherwise."""
    if d == 0:
        return H, energy_zero_state(H), None
    with console.status(f"[bold]Optimizing depth-{d} circuit...[/bold]"):
        bound = optimize_depth_d(H, d, optimizer_config(run), cap=run["oracle_cap"])
    H_d = conjugate_by_circuit(H, bound.circuit, cap=run["oracle_cap"])
    return H_d, energy_zero_state(H_d), bound


def emit(text: str, out_path: Optional[str]) -> None:
    """Write to ``out_path`` or echo to stdout."""
    if out_path:
        path = write_text(text, out_path)
        console.print(f"[green]Wrote[/green] {path}")
    else:
        click.echo(text, nl=False)


def seed_of(run: Mapping[str, Any]) -> int:
    return int(run["seed"]) if run.get("seed") is not None else config.get_seed()
