"""Table command for hamlow."""

import json

import click
from rich.table import Table

from ..bounds import (
    DEFAULT_DS,
    DEFAULT_EPSILONS,
    DEFAULT_KS,
    comparison_pivot,
    emit_comparison_table,
    plot_rows,
    rows_to_csv,
    rows_to_json,
)
from ..reports import write_text
from .common import config_option, console, emit, out_option, resolve


def _pivot_table(rows) -> Table:
    pivot = comparison_pivot(rows)
    depths = sorted({row.d for row in rows})
    table = Table(title="Runtime exponent c")
    table.add_column("k", style="cyan")
    table.add_column("ε", style="cyan")
    table.add_column("Buhrman", style="yellow")
    for d in depths:
        table.add_column(f"ours d={d}", style="green")
    for entry in pivot:
        table.add_row(
            str(entry["k"]),
            f"{entry['epsilon']:g}",
            f"{entry['c_buhrman']:.7f}",
            *[f"{entry[f'c_ours_d{d}']:.7f}" for d in depths],
        )
    return table


@click.command()
@click.option("--k", "ks", multiple=True, type=int, help="Locality (repeatable)")
@click.option("--epsilon", "epsilons", multiple=True, type=float, help="Accuracy ε (repeatable)")
@click.option("--d", "ds", multiple=True, type=int, help="Depth (repeatable)")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None, help="Output format")
@click.option("--pivot", is_flag=True, help="One row per (k, ε) with a column per depth")
@click.option("--plot-data", default=None, help="Also write exponent-vs-ε plot data (CSV)")
@out_option
@config_option
def table(ks, epsilons, ds, fmt, pivot, plot_data, out_path, config_path):
    """Compare runtime exponents over a (k, ε, d) grid."""
    run = resolve(
        config_path,
        k=ks,
        epsilon=epsilons,
        d=ds,
        format=fmt,
        pivot=pivot or None,
        plot_data=plot_data,
        out=out_path,
    )
    grid_ks = run.get("k") or list(DEFAULT_KS)
    grid_eps = run.get("epsilon") or list(DEFAULT_EPSILONS)
    grid_ds = run.get("d") or list(DEFAULT_DS)
    rows = emit_comparison_table(grid_ks, grid_eps, grid_ds)

    if (run.get("format") or "csv") == "json":
        if run.get("pivot"):
            text = json.dumps(comparison_pivot(rows), indent=2) + "\n"
        else:
            text = rows_to_json(rows) + "\n"
    elif run.get("pivot"):
        pivot_rows = comparison_pivot(rows)
        columns = list(pivot_rows[0]) if pivot_rows else ["k", "epsilon", "c_buhrman", "c_buhrman_est"]
        lines = [",".join(columns)]
        lines += [",".join(repr(entry[column]) for column in columns) for entry in pivot_rows]
        text = "\n".join(lines) + "\n"
    else:
        text = rows_to_csv(rows)
    emit(text, run.get("out"))

    if run.get("plot_data"):
        path = write_text(plot_rows(grid_ks, grid_ds), run["plot_data"])
        if run.get("out"):
            console.print(f"[green]Wrote plot data[/green] {path}")
    if run.get("out") and rows:
        console.print(_pivot_table(rows))
