"""Main entry point for hamlow."""

import logging
import sys

import click
from rich.console import Console
from rich.logging import RichHandler

from . import __version__
from .commands.certify import certify
from .commands.gen import gen
from .commands.optimize import optimize_depth
from .commands.setup import setup
from .commands.simulate import simulate
from .commands.status import status
from .commands.sweep import sweep
from .commands.table import table
from .errors import HamlowError

EXIT_USAGE = 1

err_console = Console(stderr=True)


def setup_logging(verbose: bool) -> None:
    """Route the package loggers through rich."""
    logger = logging.getLogger("hamlow")
    logger.setLevel(logging.DEBUG if verbose else logging.WARNING)
    if not any(isinstance(handler, RichHandler) for handler in logger.handlers):
        handler = RichHandler(console=err_console, show_path=False, rich_tracebacks=True)
        handler.setFormatter(logging.Formatter("%(message)s"))
        logger.addHandler(handler)
    logger.propagate = False


class HamlowGroup(click.Group):
    """Click group that turns hamlow errors and usage errors into exit codes.

    0 ok, 1 usage or input error, 2 validation failure, 3 scale exceeded.
    """

    def main(self, args=None, prog_name=None, complete_var=None, standalone_mode=True, **extra):
        try:
            rv = super().main(
                args=args,
                prog_name=prog_name,
                complete_var=complete_var,
                standalone_mode=False,
                **extra,
            )
        except click.UsageError as e:
            e.show()
            sys.exit(EXIT_USAGE)
        except click.ClickException as e:
            e.show()
            sys.exit(e.exit_code)
        except click.Abort:
            err_console.print("[bold red]Aborted.[/bold red]")
            sys.exit(EXIT_USAGE)
        except HamlowError as e:
            err_console.print(f"[bold red]{type(e).__name__}:[/bold red] {e}")
            sys.exit(e.exit_code)
        if not standalone_mode:
            return rv
        sys.exit(rv if isinstance(rv, int) else 0)


@click.group(cls=HamlowGroup)
@click.version_option(version=__version__, prog_name="hamlow")
@click.option("-v", "--verbose", is_flag=True, help="Show debug logging")
def cli(verbose: bool):
    """hamlow - certify dense low-energy spectra of k-local Hamiltonians.

    \b
    Quick start:
      hamlow gen --n 8 --k 3 --m 16 --out h.json   Random k-local instance
      hamlow certify h.json --mu 0.3 --validate    Density certificate
      hamlow optimize-depth h.json --d 1           Upper bound on E_d
      hamlow simulate h.json --epsilon 0.1         Filtered state preparation
      hamlow table                                 Runtime exponent table
      hamlow sweep --workers 4                     Checks over many instances
      hamlow setup / hamlow status                 User configuration
    """
    setup_logging(verbose)


cli.add_command(gen)
cli.add_command(certify)
cli.add_command(optimize_depth)
cli.add_command(simulate)
cli.add_command(table)
cli.add_command(sweep)
cli.add_command(setup)
cli.add_command(status)


def main():
    """Main entry point."""
    cli()


if __name__ == "__main__":
    main()
