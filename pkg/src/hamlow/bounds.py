"""Runtime exponents for low-energy estimation and the regime where the entropy bound wins.

All exponents are the constant c in a runtime O*(2^{c·n}).
"""

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy.special import entr

from .errors import InvalidParameterError

DEFAULT_KS = (3, 4, 10)
DEFAULT_EPSILONS = (0.125, 0.05, 0.01, 0.001)
DEFAULT_DS = (0, 1)

CSV_HEADER = ("k", "epsilon", "d", "c_buhrman", "c_buhrman_est", "c_ours")

# Upper limit on the crossover scan; the inequality fails long before this for ε > 0.
MAX_SCAN_DEPTH = 256


@dataclass(frozen=True)
class ExponentRow:
    k: int
    epsilon: float
    d: int
    c_buhrman: float
    c_buhrman_est: float
    c_ours: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def binary_entropy(x: float) -> float:
    """H(x) in bits, with H(0) = H(1) = 0."""
    if not 0.0 <= x <= 1.0:
        raise InvalidParameterError(f"Binary entropy needs x in [0, 1], got {x}")
    return float((entr(x) + entr(1.0 - x)) / math.log(2.0))


def _check_k_epsilon(k: int, epsilon: float) -> None:
    if k < 1:
        raise InvalidParameterError(f"k must be at least 1, got {k}")
    if not epsilon > 0:
        raise InvalidParameterError(f"epsilon must be positive, got {epsilon}")


def entropy_argument(k: int, epsilon: float, d: int) -> float:
    """ε/(2^{d+2}k)."""
    _check_k_epsilon(k, epsilon)
    if d < 0:
        raise InvalidParameterError(f"d must be non-negative, got {d}")
    return epsilon / (2 ** (d + 2) * k)


def exponent_ours(k: int, epsilon: float, d: int) -> float:
    """c = ½(1 − ½H(ε/(2^{d+2}k)))."""
    argument = entropy_argument(k, epsilon, d)
    if argument > 0.5:
        raise InvalidParameterError(
            f"Entropy argument {argument} exceeds 1/2 (k={k}, epsilon={epsilon}, d={d})"
        )
    return 0.5 * (1.0 - 0.5 * binary_entropy(argument))


def exponent_buhrman(k: int, epsilon: float) -> float:
    """c = ½(1 − ε/(2k+ε))."""
    _check_k_epsilon(k, epsilon)
    return 0.5 * (1.0 - epsilon / (2 * k + epsilon))


def exponent_buhrman_estimation(k: int, epsilon: float) -> float:
    """c = ½(1 − ε/(k+ε)), the variant for estimation only."""
    _check_k_epsilon(k, epsilon)
    return 0.5 * (1.0 - epsilon / (k + epsilon))


def beats_buhrman(k: int, epsilon: float, d: int) -> bool:
    """½H(ε/(2^{d+2}k)) ≥ ε/(2k+ε); ties count as faster."""
    argument = entropy_argument(k, epsilon, d)
    if argument > 0.5:
        return False
    return 0.5 * binary_entropy(argument) >= epsilon / (2 * k + epsilon)


def crossover_depth(k: int, epsilon: float) -> Optional[int]:
    """Largest d for which the entropy exponent is at least as good; None if d = 0 fails."""
    _check_k_epsilon(k, epsilon)
    if not beats_buhrman(k, epsilon, 0):
        return None
    d = 0
    while d < MAX_SCAN_DEPTH and beats_buhrman(k, epsilon, d + 1):
        d += 1
    return d


def crossover_diagnostic(k: int, epsilon: float) -> Dict[str, Any]:
    """d_max next to log2 log2(k/ε), which it tracks asymptotically."""
    ratio = k / epsilon
    loglog = math.log2(math.log2(ratio)) if ratio > 2 else None
    return {"k": k, "epsilon": epsilon, "d_max": crossover_depth(k, epsilon), "log2_log2": loglog}


def emit_comparison_table(
    ks: Sequence[int] = DEFAULT_KS,
    epsilons: Sequence[float] = DEFAULT_EPSILONS,
    ds: Sequence[int] = DEFAULT_DS,
) -> List[ExponentRow]:
    """One row per (k, ε, d), in that nesting order."""
    rows = []
    for k in ks:
        for epsilon in epsilons:
            c_buhrman = exponent_buhrman(k, epsilon)
            c_est = exponent_buhrman_estimation(k, epsilon)
            for d in ds:
                rows.append(
                    ExponentRow(
                        k=int(k),
                        epsilon=float(epsilon),
                        d=int(d),
                        c_buhrman=c_buhrman,
                        c_buhrman_est=c_est,
                        c_ours=exponent_ours(k, epsilon, d),
                    )
                )
    return rows


def comparison_pivot(rows: Sequence[ExponentRow]) -> List[Dict[str, Any]]:
    """Wide layout: one entry per (k, ε) with a ``c_ours_d{d}`` column per depth."""
    pivot: Dict[tuple, Dict[str, Any]] = {}
    for row in rows:
        entry = pivot.setdefault(
            (row.k, row.epsilon),
            {
                "k": row.k,
                "epsilon": row.epsilon,
                "c_buhrman": row.c_buhrman,
                "c_buhrman_est": row.c_buhrman_est,
            },
        )
        entry[f"c_ours_d{row.d}"] = row.c_ours
    return list(pivot.values())


def rows_to_csv(rows: Sequence[ExponentRow]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in rows:
        writer.writerow([row.k, repr(row.epsilon), row.d] + [
            repr(value) for value in (row.c_buhrman, row.c_buhrman_est, row.c_ours)
        ])
    return buffer.getvalue()


def rows_to_json(rows: Sequence[ExponentRow]) -> str:
    return json.dumps([row.to_dict() for row in rows], indent=2)


def plot_rows(
    ks: Sequence[int] = DEFAULT_KS,
    ds: Sequence[int] = DEFAULT_DS,
    epsilons: Optional[Sequence[float]] = None,
) -> str:
    """Plot data (exponent against ε, one series per k and d) as CSV."""
    if epsilons is None:
        epsilons = np.geomspace(1e-3, 0.5, 40)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["k", "d", "epsilon", "c_ours", "c_buhrman"])
    for k in ks:
        for d in ds:
            for epsilon in epsilons:
                writer.writerow([
                    k,
                    d,
                    repr(float(epsilon)),
                    repr(exponent_ours(k, float(epsilon), d)),
                    repr(exponent_buhrman(k, float(epsilon))),
                ])
    return buffer.getvalue()
