"""hamlow - certify dense low-energy spectra of k-local Hamiltonians."""

from importlib.metadata import version, PackageNotFoundError

try:
    __version__ = version("hamlow-cli")
except PackageNotFoundError:
    __version__ = "0.0.0"  # Development mode
