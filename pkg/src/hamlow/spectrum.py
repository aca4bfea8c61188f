"""Exact-diagonalization oracle: eigenvalues, N(E) and low-energy projector overlaps."""

import csv
import io
import logging
from dataclasses import dataclass, field
from typing import Iterable, List, Optional

import numpy as np
from scipy import linalg

from .errors import InvalidParameterError
from .hamiltonian import LocalHamiltonian, assemble_matrix

logger = logging.getLogger(__name__)

COUNT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SpectralSummary:
    """Sorted spectrum of a Hamiltonian, optionally with its eigenvectors as columns."""

    eigenvalues: np.ndarray
    source_n: int
    eigenvectors: Optional[np.ndarray] = field(default=None, repr=False)
    tolerance: float = COUNT_TOL

    def __post_init__(self):
        values = np.array(self.eigenvalues, dtype=float)
        if values.shape != (2**self.source_n,):
            raise InvalidParameterError(
                f"Spectrum of {self.source_n} qubits needs {2 ** self.source_n} eigenvalues"
            )
        if np.any(np.diff(values) < 0):
            raise InvalidParameterError("Eigenvalues must be sorted ascending")
        values.setflags(write=False)
        object.__setattr__(self, "eigenvalues", values)
        if self.eigenvectors is not None:
            vectors = np.asarray(self.eigenvectors)
            vectors.setflags(write=False)
            object.__setattr__(self, "eigenvectors", vectors)

    @property
    def dimension(self) -> int:
        return 2**self.source_n

    @property
    def has_vectors(self) -> bool:
        return self.eigenvectors is not None


def diagonalize(
    H: LocalHamiltonian, keep_vectors: bool = False, cap: Optional[int] = None
) -> SpectralSummary:
    """Full dense Hermitian eigensolve of the assembled matrix."""
    matrix = assemble_matrix(H, cap=cap)
    if keep_vectors:
        values, vectors = linalg.eigh(matrix)
    else:
        values, vectors = linalg.eigvalsh(matrix), None
    logger.debug("Diagonalized %d qubits: λ0=%.10f λmax=%.10f", H.n, values[0], values[-1])
    return SpectralSummary(eigenvalues=values, source_n=H.n, eigenvectors=vectors)


def ground_energy(S: SpectralSummary) -> float:
    return float(S.eigenvalues[0])


def max_energy(S: SpectralSummary) -> float:
    return float(S.eigenvalues[-1])


def spectral_count(S: SpectralSummary, E: float) -> int:
    """N(E) = #{i : λ_i ≤ E + tolerance}."""
    return int(np.searchsorted(S.eigenvalues, E + S.tolerance, side="right"))


def _coefficients(S: SpectralSummary, state: np.ndarray) -> np.ndarray:
    if not S.has_vectors:
        raise InvalidParameterError("Spectral summary was built without eigenvectors")
    state = np.asarray(state, dtype=complex)
    if state.shape != (S.dimension,):
        raise InvalidParameterError(
            f"State has shape {state.shape}, expected ({S.dimension},)"
        )
    return S.eigenvectors.conj().T @ state


def projector_overlap(state: np.ndarray, S: SpectralSummary, E: float) -> float:
    """γ = Σ_{λ_i ≤ E} |⟨state|φ_i⟩|²."""
    weights = np.abs(_coefficients(S, state)) ** 2
    return float(np.sum(weights[: spectral_count(S, E)]))


def expectation_value(S: SpectralSummary, state: np.ndarray) -> float:
    """⟨state|H|state⟩ in the eigenbasis."""
    weights = np.abs(_coefficients(S, state)) ** 2
    return float(np.dot(weights, S.eigenvalues))


def spectrum_rows(S: SpectralSummary) -> str:
    """CSV export with header ``index,eigenvalue``."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["index", "eigenvalue"])
    for index, value in enumerate(S.eigenvalues):
        writer.writerow([index, repr(float(value))])
    return buffer.getvalue()


def count_sweep(S: SpectralSummary, energies: Iterable[float]) -> str:
    """CSV export of N(E) with header ``E,count``."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["E", "count"])
    for E in energies:
        writer.writerow([repr(float(E)), spectral_count(S, E)])
    return buffer.getvalue()


def default_energies(S: SpectralSummary, points: int = 33) -> List[float]:
    """Evenly spaced energies from λ0 to λmax for a count sweep."""
    return [float(E) for E in np.linspace(ground_energy(S), max_energy(S), points)]
