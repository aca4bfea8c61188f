"""Lower bounds on the low-energy spectral count from perturbed basis-state families.

The construction:

1. The quiet set Q_δ holds the sites whose local weight e(s) is at most δL/n.
2. Flipping any subset R ⊆ Q_δ with |R| ≤ r on |0…0⟩ gives mutually orthogonal basis
   states whose energies stay within μηM of the reference energy.
3. Cauchy interlacing turns that orthonormal family into at least
   D = ((1−η)μ/(μ+2))·|family| eigenvalues at or below E_ref + μM.

``certify_density`` optimizes D over a (δ, η) grid and can check it against the exact
spectrum.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from .bounds import binary_entropy
from .errors import (
    DegenerateInstanceError,
    InvalidParameterError,
    ValidationFailure,
)
from .hamiltonian import LocalHamiltonian, basis_energy
from .spectrum import SpectralSummary, diagonalize, spectral_count

logger = logging.getLogger(__name__)

WINDOW_TOL = 1e-9
REFERENCE_TOL = 1e-9
TRACE_TOL = 1e-8
FLOOR_TOL = 1e-12


@dataclass(frozen=True)
class QuietSet:
    delta: float
    threshold: float
    sites: Tuple[int, ...]
    n: int

    @property
    def size(self) -> int:
        return len(self.sites)

    @property
    def lower_bound(self) -> float:
        """(δ−1)n/δ, the guaranteed minimum size."""
        return (self.delta - 1.0) * self.n / self.delta


@dataclass(frozen=True)
class PerturbationFamily:
    quiet: QuietSet
    r: int
    family_size: int
    window: float
    clamped: bool = False


@dataclass
class Validation:
    exact_count: int
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"exact_count": self.exact_count, "pass": self.passed}


@dataclass
class DensityCertificate:
    mu: float
    eta: float
    delta: float
    r: int
    quiet_set_size: int
    family_size: int
    lower_bound_D: float
    log2_D: Optional[float]
    threshold_energy: float
    reference_energy: float
    clamped: bool = False
    count_exponent: Optional[float] = None
    simple_point_exponent: Optional[float] = None
    validated: Optional[Validation] = None

    @property
    def log2_family_size(self) -> float:
        return _log2_int(self.family_size)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mu": self.mu,
            "eta": self.eta,
            "delta": self.delta,
            "r": self.r,
            "quiet_set_size": self.quiet_set_size,
            "family_size": str(self.family_size),
            "log2_family_size": self.log2_family_size,
            "lower_bound_D": self.lower_bound_D,
            "log2_D": self.log2_D,
            "threshold_energy": self.threshold_energy,
            "reference_energy": self.reference_energy,
            "clamped": self.clamped,
            "count_exponent": self.count_exponent,
            "simple_point_exponent": self.simple_point_exponent,
            "validated": self.validated.to_dict() if self.validated else None,
        }


@dataclass
class DensityGrid:
    """Search grid for certify_density.

    δ runs over ``delta_points`` log-spaced values from the admissible floor to
    ``floor * delta_span`` (or to ``delta_max`` when given); η over ``eta_points``
    uniform values in [0, 1].
    """

    delta_points: int = 64
    delta_span: float = 16.0
    eta_points: int = 65
    delta_max: Optional[float] = None
    include_simple_point: bool = True

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "DensityGrid":
        grid = cls(**{name: data[name] for name in cls.__dataclass_fields__ if name in data})
        if grid.delta_points < 1 or grid.eta_points < 1 or grid.delta_span < 1:
            raise InvalidParameterError("Grid needs at least one δ and one η point")
        return grid

    def to_dict(self) -> Dict[str, Any]:
        return {
            "delta_points": self.delta_points,
            "delta_span": self.delta_span,
            "eta_points": self.eta_points,
            "delta_max": self.delta_max,
            "include_simple_point": self.include_simple_point,
        }


def _log2_int(value: int) -> float:
    if value <= 0:
        return float("-inf")
    shift = max(value.bit_length() - 64, 0)
    return shift + math.log2(value >> shift)


def _check_mu_eta(mu: float, eta: float) -> None:
    if not mu > 0:
        raise InvalidParameterError(f"mu must be positive, got {mu}")
    if not 0.0 <= eta <= 1.0:
        raise InvalidParameterError(f"eta must lie in [0, 1], got {eta}")


def admissible_delta_floor(H_d: LocalHamiltonian, mu: float) -> float:
    """Smallest admissible δ, 1 + μM/L."""
    if not mu > 0:
        raise InvalidParameterError(f"mu must be positive, got {mu}")
    if H_d.L <= 0:
        raise DegenerateInstanceError("Instance has no interaction weight (L = 0)")
    return 1.0 + mu * H_d.M / H_d.L


def build_quiet_set(H_d: LocalHamiltonian, delta: float, mu: float) -> QuietSet:
    floor = admissible_delta_floor(H_d, mu)
    if delta < floor - FLOOR_TOL:
        raise InvalidParameterError(f"delta={delta} is below the admissible floor {floor}")
    threshold = delta * H_d.L / H_d.n
    slack = FLOOR_TOL * max(1.0, threshold)
    sites = tuple(int(s) for s in np.flatnonzero(H_d.e <= threshold + slack))
    quiet = QuietSet(delta=float(delta), threshold=threshold, sites=sites, n=H_d.n)
    if quiet.size < quiet.lower_bound - FLOOR_TOL * H_d.n:
        raise ValidationFailure(
            f"Quiet set of size {quiet.size} is below its guaranteed size {quiet.lower_bound}"
        )
    return quiet


def max_perturbation_size(
    mu: float,
    eta: float,
    M: float,
    n: int,
    delta: float,
    L: float,
    quiet_size: Optional[int] = None,
) -> Tuple[int, bool]:
    """Largest flip count r = ⌊μηMn/(2δL)⌋, clamped to ⌊|Q_δ|/2⌋.

    Returns ``(r, clamped)``.
    """
    _check_mu_eta(mu, eta)
    if L <= 0:
        raise DegenerateInstanceError("Instance has no interaction weight (L = 0)")
    raw = mu * eta * M * n / (2.0 * delta * L)
    r = max(int(math.floor(raw + FLOOR_TOL)), 0)
    if quiet_size is not None and r > quiet_size // 2:
        logger.warning("Clamping r=%d to half the quiet set (%d)", r, quiet_size // 2)
        return quiet_size // 2, True
    return r, False


def perturbed_state(R: Sequence[int], n: int) -> int:
    """Basis index of X_R|0…0⟩: the bitmask with ones exactly on R."""
    mask = 0
    for site in R:
        site = int(site)
        if not 0 <= site < n:
            raise InvalidParameterError(f"Site {site} outside [0, {n})")
        mask |= 1 << site
    return mask


def verify_energy_window(
    H_d: LocalHamiltonian, R: Sequence[int], E_d_ref: float, window: float
) -> Tuple[float, bool]:
    """|⟨Φ_R|H_d|Φ_R⟩ − E_d_ref| and whether it lies within ``window``."""
    energy = basis_energy(H_d, perturbed_state(R, H_d.n))
    delta_exact = abs(energy - E_d_ref)
    return delta_exact, delta_exact <= window + WINDOW_TOL


@lru_cache(maxsize=4096)
def family_size(q: int, r: int) -> int:
    """Σ_{i=0..r} C(q, i), exact."""
    if q < 0 or r < 0:
        raise InvalidParameterError(f"Need q, r >= 0, got q={q}, r={r}")
    if r > q:
        raise InvalidParameterError(f"r={r} exceeds q={q}")
    return sum(math.comb(q, i) for i in range(r + 1))


def interlacing_factor(mu: float, eta: float) -> float:
    _check_mu_eta(mu, eta)
    return (1.0 - eta) * mu / (mu + 2.0)


def interlacing_bound(size: int, mu: float, eta: float) -> float:
    """D = ((1−η)μ/(μ+2))·|family|."""
    return interlacing_factor(mu, eta) * float(size)


def log2_interlacing_bound(size: int, mu: float, eta: float) -> Optional[float]:
    factor = interlacing_factor(mu, eta)
    if factor <= 0 or size <= 0:
        return None
    return math.log2(factor) + _log2_int(size)


def exact_bound_holds(exact_count: int, size: int, mu: float, eta: float) -> bool:
    """exact_count ≥ D, compared in rational arithmetic."""
    mu_q, eta_q = Fraction(mu), Fraction(eta)
    return Fraction(exact_count) >= (1 - eta_q) * mu_q / (mu_q + 2) * size


def count_exponent(
    mu: float, eta: float, delta: float, M: float, L: float, n: int
) -> float:
    """H(μηM/(2(δ−1)L))·(δ−1)n/δ, the log2 of the entropy bound on the family."""
    if delta <= 1.0:
        raise InvalidParameterError(f"delta must exceed 1, got {delta}")
    argument = min(mu * eta * M / (2.0 * (delta - 1.0) * L), 0.5)
    return binary_entropy(argument) * (delta - 1.0) * n / delta


def simple_point_exponent(mu: float, K: int, n: int) -> Optional[float]:
    """H(μ/(4K))·n/2, the exponent at η = 1/2, δ = 2; None outside the entropy regime."""
    argument = mu / (4.0 * K)
    if argument > 0.5:
        return None
    return binary_entropy(argument) * n / 2.0


def enumerate_family(quiet: QuietSet, r: int) -> Iterator[Tuple[int, ...]]:
    """Every R ⊆ Q_δ with |R| ≤ r, smallest subsets first."""
    for size in range(min(r, quiet.size) + 1):
        yield from itertools.combinations(quiet.sites, size)


def family_window_check(
    H_d: LocalHamiltonian, quiet: QuietSet, r: int, E_d_ref: float, window: float
) -> Dict[str, Any]:
    """Run verify_energy_window over the whole family."""
    worst = 0.0
    checked = 0
    violations: List[List[int]] = []
    for R in enumerate_family(quiet, r):
        shift, ok = verify_energy_window(H_d, R, E_d_ref, window)
        worst = max(worst, shift)
        checked += 1
        if not ok:
            violations.append(list(R))
    return {
        "checked": checked,
        "max_shift": worst,
        "window": window,
        "violations": violations,
        "pass": not violations,
    }


def interlacing_trace_check(
    H_d: LocalHamiltonian, quiet: QuietSet, r: int, spectrum: SpectralSummary
) -> Tuple[float, float, bool]:
    """Σ_{i<|S_r|} λ_i ≤ Σ_R ⟨Φ_R|H_d|Φ_R⟩ over the family."""
    energies = [basis_energy(H_d, perturbed_state(R, H_d.n)) for R in enumerate_family(quiet, r)]
    lowest = math.fsum(spectrum.eigenvalues[: len(energies)])
    family_total = math.fsum(energies)
    return lowest, family_total, lowest <= family_total + TRACE_TOL


def _delta_grid(floor: float, grid: DensityGrid) -> np.ndarray:
    upper = grid.delta_max if grid.delta_max is not None else floor * grid.delta_span
    if floor > upper:
        raise InvalidParameterError(
            f"No admissible grid point: delta floor {floor} exceeds grid maximum {upper}"
        )
    return np.geomspace(floor, upper, grid.delta_points)


def certify_density(
    H_d: LocalHamiltonian,
    E_d_ref: float,
    mu: float,
    grid: Optional[DensityGrid] = None,
    validate: bool = False,
    spectrum: Optional[SpectralSummary] = None,
    cap: Optional[int] = None,
) -> DensityCertificate:
    """Best interlacing lower bound on N(E_d_ref + μM) over the (δ, η) grid.

    Ties keep the smallest δ, then the smallest η. With ``validate`` the bound is
    compared to the exact count from the oracle.
    """
    grid = grid or DensityGrid()
    floor = admissible_delta_floor(H_d, mu)
    zero_energy = basis_energy(H_d, 0)
    if E_d_ref < zero_energy - REFERENCE_TOL:
        raise InvalidParameterError(
            f"Reference energy {E_d_ref} lies below ⟨0|H_d|0⟩ = {zero_energy}"
        )

    points = [(float(delta), float(eta)) for delta in _delta_grid(floor, grid)
              for eta in np.linspace(0.0, 1.0, grid.eta_points)]
    if grid.include_simple_point and 2.0 >= floor:
        points.append((2.0, 0.5))
    points.sort()

    quiet_sets: Dict[float, QuietSet] = {}
    best = None
    for delta, eta in points:
        quiet = quiet_sets.get(delta)
        if quiet is None:
            quiet = quiet_sets[delta] = build_quiet_set(H_d, delta, mu)
        r, clamped = max_perturbation_size(
            mu, eta, H_d.M, H_d.n, delta, H_d.L, quiet_size=quiet.size
        )
        size = family_size(quiet.size, r)
        D = interlacing_bound(size, mu, eta)
        if best is None or D > best[0]:
            best = (D, delta, eta, quiet, r, size, clamped)
    D, delta, eta, quiet, r, size, clamped = best
    logger.debug(
        "μ=%g: best D=%g at δ=%g η=%g (|Q|=%d, r=%d) over %d points",
        mu, D, delta, eta, quiet.size, r, len(points),
    )

    certificate = DensityCertificate(
        mu=float(mu),
        eta=eta,
        delta=delta,
        r=r,
        quiet_set_size=quiet.size,
        family_size=size,
        lower_bound_D=D,
        log2_D=log2_interlacing_bound(size, mu, eta),
        threshold_energy=E_d_ref + mu * H_d.M,
        reference_energy=float(E_d_ref),
        clamped=clamped,
        count_exponent=count_exponent(mu, eta, delta, H_d.M, H_d.L, H_d.n),
        simple_point_exponent=simple_point_exponent(mu, H_d.k, H_d.n),
    )
    if validate:
        spectrum = spectrum or diagonalize(H_d, cap=cap)
        exact = spectral_count(spectrum, certificate.threshold_energy)
        passed = exact_bound_holds(exact, size, mu, eta)
        certificate.validated = Validation(exact_count=exact, passed=passed)
        if not passed:
            logger.error(
                "Certificate D=%g exceeds exact count %d at E=%g", D, exact,
                certificate.threshold_energy,
            )
    return certificate


def family_for(H_d: LocalHamiltonian, certificate: DensityCertificate) -> PerturbationFamily:
    """Rebuild the perturbation family a certificate was issued for."""
    quiet = build_quiet_set(H_d, certificate.delta, certificate.mu)
    return PerturbationFamily(
        quiet=quiet,
        r=certificate.r,
        family_size=certificate.family_size,
        window=certificate.mu * certificate.eta * H_d.M,
        clamped=certificate.clamped,
    )
