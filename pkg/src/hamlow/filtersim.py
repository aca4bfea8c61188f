"""Low-energy state preparation by filtering a maximally entangled 2n-qubit state.

The 2n-qubit register holds the system and an ancilla copy. A vector is indexed
``k_sys * 2**n + k_anc``, so reshaping it to a ``(2**n, 2**n)`` matrix Ψ puts the system
on rows: (H ⊗ I)|ψ⟩ is ``H @ Ψ`` and the reduced system state is ``Ψ Ψ†``. Nothing of
size 2^{2n} x 2^{2n} is ever built.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import chebyshev
from scipy.special import erfc

from .bounds import binary_entropy
from .config import get_oracle_cap, get_vector_cap
from .errors import (
    EmptyOverlapError,
    InvalidParameterError,
    ScaleExceededError,
    ValidationFailure,
)
from .hamiltonian import LocalHamiltonian, assemble_matrix
from .spectrum import SpectralSummary, diagonalize, ground_energy, max_energy, spectral_count

logger = logging.getLogger(__name__)

OVERLAP_TOL = 1e-12
EMPTY_TOL = 1e-15
PROBABILITY_TOL = 1e-9
ENERGY_TOL = 1e-9
MODES = ("exact", "poly")
SCALES = ("spectrum", "norm")


@dataclass(frozen=True, eq=False)
class ExtendedSystem:
    """H ⊗ I on 2n qubits, represented by the base Hamiltonian and its eigenbasis."""

    base: LocalHamiltonian
    spectral: SpectralSummary
    matrix: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def total_qubits(self) -> int:
        return 2 * self.base.n

    @property
    def dimension(self) -> int:
        return 2**self.base.n


@dataclass
class FilterOutcome:
    post_state: np.ndarray = field(repr=False)
    success_probability: float
    reduced_density: np.ndarray = field(repr=False)
    energy: float
    mode: str
    x: Optional[float] = None
    y: Optional[float] = None
    mu: Optional[float] = None
    gamma: Optional[float] = None
    degree: Optional[int] = None
    estimate: Optional[float] = None
    stderr: Optional[float] = None
    calls_UH: Optional[float] = None
    calls_UI: Optional[float] = None
    fidelity_to_exact: Optional[float] = None
    raw_success_probability: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "x": self.x,
            "y": self.y,
            "mu": self.mu,
            "gamma": self.gamma,
            "success_probability": self.success_probability,
            "raw_success_probability": self.raw_success_probability,
            "energy": self.energy,
            "estimate": self.estimate,
            "stderr": self.stderr,
            "calls_UH": self.calls_UH,
            "calls_UI": self.calls_UI,
            "mode": self.mode,
            "degree": self.degree,
            "fidelity_to_exact": self.fidelity_to_exact,
        }


@dataclass
class EnergyEstimate:
    estimate: float
    stderr: float
    per_term: List[float]
    exact: float
    samples_per_term: int

    @property
    def within_3sigma(self) -> bool:
        return abs(self.estimate - self.exact) <= 3.0 * self.stderr + ENERGY_TOL


def _check_vector_scale(n: int, vector_cap: Optional[int]) -> None:
    cap = vector_cap if vector_cap is not None else get_vector_cap()
    if 2 * n > cap:
        raise ScaleExceededError(2 * n, cap, what="vector")


def build_extended_system(
    H: LocalHamiltonian, cap: Optional[int] = None, vector_cap: Optional[int] = None
) -> ExtendedSystem:
    _check_vector_scale(H.n, vector_cap)
    cap = get_oracle_cap(cap)
    spectral = diagonalize(H, keep_vectors=True, cap=cap)
    return ExtendedSystem(base=H, spectral=spectral, matrix=assemble_matrix(H, cap=cap))


def maximally_entangled(n: int, vector_cap: Optional[int] = None) -> np.ndarray:
    """(1/√2^n) Σ_k |k⟩|k⟩."""
    if n < 1:
        raise InvalidParameterError(f"n must be positive, got {n}")
    _check_vector_scale(n, vector_cap)
    dim = 2**n
    return (np.eye(dim, dtype=complex) / math.sqrt(dim)).reshape(-1)


def _as_matrix(system: ExtendedSystem, state: np.ndarray) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    dim = system.dimension
    if state.shape != (dim * dim,):
        raise InvalidParameterError(
            f"State has shape {state.shape}, expected ({dim * dim},) for {system.total_qubits} qubits"
        )
    return state.reshape(dim, dim)


def partial_trace_ancilla(state: np.ndarray, n: int) -> np.ndarray:
    """ρ = Tr_anc |ψ⟩⟨ψ| on the system register."""
    psi = np.asarray(state, dtype=complex).reshape(2**n, 2**n)
    return psi @ psi.conj().T


_LETTERS = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


def reduced_density_on(rho: np.ndarray, n: int, qubits: Sequence[int]) -> np.ndarray:
    """Reduced density matrix on ``qubits`` (``qubits[0]`` most significant)."""
    tensor = np.asarray(rho).reshape([2] * (2 * n))
    rows = list(_LETTERS[:n])
    cols = list(_LETTERS[n : 2 * n])
    kept = [n - 1 - q for q in qubits]
    for axis in range(n):
        if axis not in kept:
            cols[axis] = rows[axis]
    out = "".join(rows[a] for a in kept) + "".join(cols[a] for a in kept)
    j = len(qubits)
    return np.einsum("".join(rows) + "".join(cols) + "->" + out, tensor).reshape(2**j, 2**j)


def state_fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """|⟨a|b⟩|² for unit vectors."""
    return float(abs(np.vdot(np.asarray(a).reshape(-1), np.asarray(b).reshape(-1))) ** 2)


def explicit_overlap(system: ExtendedSystem, state: np.ndarray, E: float) -> float:
    """⟨ψ|(P_{≤E} ⊗ I)|ψ⟩ from the eigenvector coefficients of the 2n-qubit state."""
    coefficients = system.spectral.eigenvectors.conj().T @ _as_matrix(system, state)
    count = spectral_count(system.spectral, E)
    return float(np.sum(np.abs(coefficients[:count]) ** 2))


def overlap_gamma(system: ExtendedSystem, E: float, cross_check: bool = True) -> float:
    """γ = N(E)/2^n for the maximally entangled state.

    With ``cross_check`` the explicit 2n-qubit overlap must agree within 1e-12.
    """
    gamma = spectral_count(system.spectral, E) / system.dimension
    if cross_check:
        explicit = explicit_overlap(system, maximally_entangled(system.n), E)
        if abs(explicit - gamma) > OVERLAP_TOL:
            raise ValidationFailure(
                f"Overlap mismatch at E={E}: N(E)/2^n={gamma}, explicit={explicit}"
            )
    return gamma


def _outcome(system: ExtendedSystem, post: np.ndarray, mode: str, degree=None) -> FilterOutcome:
    probability = float(np.vdot(post, post).real)
    if probability <= EMPTY_TOL:
        raise EmptyOverlapError("Empty low-energy subspace overlap: nothing survives the filter")
    if probability > 1.0 + PROBABILITY_TOL:
        logger.warning(
            "Filter %s (degree %s) amplifies the state: raw success probability %.6g > 1",
            mode, degree, probability,
        )
    post = post / math.sqrt(probability)
    energy = float(np.vdot(post, system.matrix @ post).real)
    return FilterOutcome(
        post_state=post.reshape(-1),
        success_probability=min(probability, 1.0),
        raw_success_probability=probability,
        reduced_density=post @ post.conj().T,
        energy=energy,
        mode=mode,
        degree=degree,
    )


def exact_filter(system: ExtendedSystem, state: np.ndarray, E: float) -> FilterOutcome:
    """Post-select onto the eigenvalues ≤ E of the system register."""
    psi = _as_matrix(system, state)
    vectors = system.spectral.eigenvectors
    coefficients = vectors.conj().T @ psi
    coefficients[spectral_count(system.spectral, E) :] = 0.0
    return _outcome(system, vectors @ coefficients, "exact")


def jackson_kernel(degree: int) -> np.ndarray:
    """Jackson damping factors for Chebyshev coefficients 0..degree."""
    N = degree + 1
    k = np.arange(N)
    q = np.pi / (N + 1)
    return ((N - k + 1) * np.cos(q * k) + np.sin(q * k) / np.tan(q)) / (N + 1)


def step_coefficients(
    t_center: float, sigma: float, degree: int, damping: bool = True
) -> np.ndarray:
    """Chebyshev coefficients of ½·erfc((t − t_center)/σ) on [−1, 1]."""
    coefficients = chebyshev.chebinterpolate(
        lambda t: 0.5 * erfc((t - t_center) / sigma), degree
    )
    if damping:
        coefficients = coefficients * jackson_kernel(degree)
    return coefficients


def _spectral_range(system: ExtendedSystem, scale: str) -> Tuple[float, float]:
    if scale == "spectrum":
        lo, hi = ground_energy(system.spectral), max_energy(system.spectral)
    elif scale == "norm":
        lo, hi = -system.base.M, system.base.M
    else:
        raise InvalidParameterError(f"Unknown scale {scale!r}; choose from {SCALES}")
    if hi - lo < 1e-12:
        hi = lo + 1.0
    return lo, hi


def chebyshev_filter(
    system: ExtendedSystem,
    state: np.ndarray,
    x: float,
    y: float,
    degree: int,
    damping: bool = True,
    scale: str = "spectrum",
    sharpness: float = 3.0,
) -> FilterOutcome:
    """Apply a smoothed step polynomial P(H) ⊗ I, passing energies below x − y.

    The step is centered in [x − y, x] and evaluated with the Clenshaw recurrence on
    the system register.
    """
    if degree < 1:
        raise InvalidParameterError(f"degree must be at least 1, got {degree}")
    if not y > 0:
        raise InvalidParameterError(f"y must be positive, got {y}")
    psi = _as_matrix(system, state)
    lo, hi = _spectral_range(system, scale)
    half = 0.5 * (hi - lo)
    t_center = (x - 0.5 * y - 0.5 * (hi + lo)) / half
    sigma = (0.5 * y / half) / sharpness
    coefficients = step_coefficients(t_center, sigma, degree, damping)

    rescaled = (system.matrix - 0.5 * (hi + lo) * np.eye(system.dimension)) / half
    b1 = np.zeros_like(psi)
    b2 = np.zeros_like(psi)
    for c in coefficients[:0:-1]:
        b1, b2 = c * psi + 2.0 * (rescaled @ b1) - b2, b1
    post = coefficients[0] * psi + rescaled @ b1 - b2
    logger.debug("Chebyshev filter degree %d, step center %.6f, width %.6f", degree, t_center, sigma)
    return _outcome(system, post, "poly", degree=degree)


def query_cost_model(gamma: float, y: float) -> Tuple[float, float]:
    """Calls to the block encoding U_H and to the state preparation U_I.

    1/(y·√γ) and 1/√γ, with polylog factors dropped.
    """
    if not 0 < gamma <= 1 + OVERLAP_TOL:
        raise InvalidParameterError(f"gamma must lie in (0, 1], got {gamma}")
    if not y > 0:
        raise InvalidParameterError(f"y must be positive, got {y}")
    root = math.sqrt(gamma)
    return 1.0 / (y * root), 1.0 / root


def density_gamma_bound(n: int, k: int, d: int, mu: float) -> float:
    """Overlap guaranteed by the density certificate: 2^{(n/2)·H(μ/(2^{d+2}k)) − n}."""
    argument = mu / (2 ** (d + 2) * k)
    if not 0 < argument <= 0.5:
        raise InvalidParameterError(f"Entropy argument {argument} outside (0, 1/2]")
    return 2.0 ** (0.5 * n * binary_entropy(argument) - n)


def cost_exponent(n: int, k: int, epsilon: float, d: int) -> float:
    """log2(1/√γ)/n with γ from the density bound at μ = (1 − 1/n)ε."""
    if n < 2:
        raise InvalidParameterError(f"n must be at least 2, got {n}")
    mu = (1.0 - 1.0 / n) * epsilon
    _, calls_ui = query_cost_model(density_gamma_bound(n, k, d, mu), 1.0)
    return math.log2(calls_ui) / n


def estimate_in_window(estimate: float, stderr: float, lambda0: float, x: float) -> bool:
    """Ê ∈ [λ0 − 3σ, x + 3σ] up to 1e-9."""
    slack = 3.0 * stderr + ENERGY_TOL
    return lambda0 - slack <= estimate <= x + slack


def _term_estimate(
    rho: np.ndarray, H: LocalHamiltonian, index: int, samples: int, batch_size: int, seed: int
) -> Tuple[float, float]:
    term = H.terms[index]
    values, vectors = np.linalg.eigh(term.operator)
    if term.is_pauli:
        values = np.sign(values) * abs(term.weight)
    local = reduced_density_on(rho, H.n, term.qubits)
    probabilities = np.clip(np.einsum("ji,jk,ki->i", vectors.conj(), local, vectors).real, 0, None)
    probabilities = probabilities / probabilities.sum()

    counts = np.zeros(len(values), dtype=np.int64)
    remaining, batch = samples, 0
    while remaining > 0:
        size = min(batch_size, remaining)
        rng = np.random.default_rng([seed, index, batch])
        counts += rng.multinomial(size, probabilities)
        remaining -= size
        batch += 1
    mean = float(np.dot(counts, values)) / samples
    if samples > 1:
        variance = float(np.dot(counts, (values - mean) ** 2)) / (samples - 1) / samples
    else:
        variance = 0.0
    return mean, variance


def estimate_energy(
    source: Union[FilterOutcome, np.ndarray],
    H: LocalHamiltonian,
    samples_per_term: int,
    seed: int = 0,
    batch_size: int = 1000,
    workers: int = 1,
) -> EnergyEstimate:
    """Estimate Tr[Hρ] by measuring every term in its eigenbasis on fresh copies of ρ.

    Batches draw from generators seeded with (seed, term index, batch index).
    """
    if samples_per_term < 1:
        raise InvalidParameterError(f"samples_per_term must be at least 1, got {samples_per_term}")
    rho = source.reduced_density if isinstance(source, FilterOutcome) else np.asarray(source)
    if rho.shape != (2**H.n, 2**H.n):
        raise InvalidParameterError(f"Density matrix has shape {rho.shape} for {H.n} qubits")

    def run(index: int) -> Tuple[float, float]:
        return _term_estimate(rho, H, index, samples_per_term, batch_size, seed)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, range(H.m)))
    else:
        results = [run(index) for index in range(H.m)]

    per_term = [mean for mean, _ in results]
    exact = math.fsum(
        term.weight * float(np.trace(reduced_density_on(rho, H.n, term.qubits) @ term.body).real)
        for term in H.terms
    )
    estimate = EnergyEstimate(
        estimate=sum(per_term),
        stderr=math.sqrt(math.fsum(variance for _, variance in results)),
        per_term=per_term,
        exact=exact,
        samples_per_term=samples_per_term,
    )
    if not estimate.within_3sigma:
        logger.warning(
            "Energy estimate %.6f is more than 3σ (%.2e) from Tr[Hρ]=%.6f",
            estimate.estimate, estimate.stderr, exact,
        )
    return estimate


def prepare_low_energy(
    H: LocalHamiltonian,
    epsilon: float,
    E_d_ref: float,
    mode: str = "exact",
    degree: int = 256,
    system: Optional[ExtendedSystem] = None,
    damping: bool = True,
    scale: str = "spectrum",
    cap: Optional[int] = None,
) -> FilterOutcome:
    """Filter the maximally entangled state below x = E_d_ref + εM and trace out the ancilla.

    Uses y = εM/n and μ = (1 − 1/n)ε, so the exact filter threshold x − y equals
    E_d_ref + μM.
    """
    if not epsilon > 0:
        raise InvalidParameterError(f"epsilon must be positive, got {epsilon}")
    if mode not in MODES:
        raise InvalidParameterError(f"Unknown mode {mode!r}; choose from {MODES}")
    system = system or build_extended_system(H, cap=cap)
    n, M = H.n, H.M
    x = E_d_ref + epsilon * M
    y = epsilon * M / n
    mu = (1.0 - 1.0 / n) * epsilon
    initial = maximally_entangled(n)
    gamma = overlap_gamma(system, x - y)

    exact = exact_filter(system, initial, x - y)
    if mode == "exact":
        outcome = exact
    else:
        outcome = chebyshev_filter(system, initial, x, y, degree, damping=damping, scale=scale)
        outcome.fidelity_to_exact = state_fidelity(outcome.post_state, exact.post_state)

    lambda0 = ground_energy(system.spectral)
    if mode == "exact" and not lambda0 - ENERGY_TOL <= outcome.energy <= x + ENERGY_TOL:
        raise ValidationFailure(
            f"Filtered energy {outcome.energy} outside [λ0={lambda0}, x={x}]"
        )
    outcome.x, outcome.y, outcome.mu, outcome.gamma = x, y, mu, gamma
    outcome.calls_UH, outcome.calls_UI = query_cost_model(gamma, y)
    logger.info("Prepared %s filter: γ=%.6g, energy=%.10f, x=%.10f", mode, gamma, outcome.energy, x)
    return outcome
