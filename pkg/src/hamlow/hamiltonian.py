"""k-local Hamiltonians as weighted local terms.

A Hamiltonian on ``n`` qubits is a sum of terms ``weight * body`` where the body is
either a Pauli word over {X, Y, Z} or a dense Hermitian block on the term's qubits.

Conventions:
    - Site ``s`` is bit ``s`` of a computational basis index, so the basis state with
      sites {0, 2} flipped on four qubits has index 0b0101 = 5.
    - Inside a term body, ``qubits[0]`` is the most significant tensor factor:
      body = P_{q0} ⊗ P_{q1} ⊗ ...
"""

import json
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from .config import get_oracle_cap
from .errors import InvalidInstanceError, InvalidParameterError, ScaleExceededError

logger = logging.getLogger(__name__)

HERMITIAN_TOL = 1e-12

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

WEIGHT_DISTRIBUTIONS = ("pm1", "uniform", "normal")


@lru_cache(maxsize=256)
def pauli_word_matrix(word: str) -> np.ndarray:
    """Dense matrix of a Pauli word, first letter most significant."""
    matrix = reduce(np.kron, (PAULI[letter] for letter in word))
    matrix.setflags(write=False)
    return matrix


def apply_local(
    vectors: np.ndarray, body: np.ndarray, qubits: Sequence[int], n: int
) -> np.ndarray:
    """Apply ``body`` acting on ``qubits`` to a statevector or a stack of column vectors.

    ``vectors`` has shape ``(2**n,)`` or ``(2**n, b)``; the result has the same shape.
    """
    shape = vectors.shape
    j = len(qubits)
    psi = vectors.reshape([2] * n + list(shape[1:]))
    targets = [n - 1 - q for q in qubits]
    op = np.asarray(body).reshape([2] * (2 * j))
    out = np.tensordot(op, psi, axes=(list(range(j, 2 * j)), targets))
    out = np.moveaxis(out, list(range(j)), targets)
    return out.reshape(shape)


def local_index(mask: int, qubits: Sequence[int]) -> int:
    """Row of a term body that the basis state ``mask`` selects on ``qubits``."""
    j = len(qubits)
    index = 0
    for i, q in enumerate(qubits):
        index |= ((mask >> q) & 1) << (j - 1 - i)
    return index


@dataclass(frozen=True, eq=False)
class LocalTerm:
    """One weighted local term ``weight * body`` on an increasing tuple of qubits.

    Exactly one of ``pauli`` and ``matrix`` is given. ``known_norm`` lets callers that
    know the spectral norm exactly (e.g. after a unitary conjugation) skip the eigensolve.
    """

    qubits: Tuple[int, ...]
    pauli: Optional[str] = None
    matrix: Optional[np.ndarray] = None
    weight: float = 1.0
    known_norm: Optional[float] = field(default=None, repr=False)
    norm: float = field(init=False)

    def __post_init__(self):
        qubits = tuple(int(q) for q in self.qubits)
        if not qubits:
            raise InvalidInstanceError("Term must act on at least one qubit")
        if len(set(qubits)) != len(qubits):
            raise InvalidInstanceError(f"Duplicate qubit index in term {list(qubits)}")
        if any(b <= a for a, b in zip(qubits, qubits[1:])):
            raise InvalidInstanceError(f"Qubit indices must be increasing, got {list(qubits)}")
        if qubits[0] < 0:
            raise InvalidInstanceError(f"Negative qubit index in term {list(qubits)}")
        if (self.pauli is None) == (self.matrix is None):
            raise InvalidInstanceError("Term needs exactly one of 'pauli' and 'matrix'")
        object.__setattr__(self, "qubits", qubits)
        object.__setattr__(self, "weight", float(self.weight))

        if self.pauli is not None:
            word = str(self.pauli).upper()
            if len(word) != len(qubits) or any(letter not in "XYZ" for letter in word):
                raise InvalidInstanceError(
                    f"Pauli word {self.pauli!r} must use X, Y, Z on {len(qubits)} qubits"
                )
            object.__setattr__(self, "pauli", word)
            norm = abs(self.weight)
        else:
            body = np.array(self.matrix, dtype=complex)
            dim = 2 ** len(qubits)
            if body.shape != (dim, dim):
                raise InvalidInstanceError(
                    f"Dense body on {len(qubits)} qubits must be {dim}x{dim}, got {body.shape}"
                )
            if np.max(np.abs(body - body.conj().T)) > HERMITIAN_TOL:
                raise InvalidInstanceError(f"Dense body on {list(qubits)} is not Hermitian")
            body.setflags(write=False)
            object.__setattr__(self, "matrix", body)
            if self.known_norm is not None:
                norm = float(self.known_norm)
            else:
                norm = float(np.max(np.abs(linalg.eigvalsh(self.weight * body))))
        object.__setattr__(self, "norm", norm)

    @property
    def size(self) -> int:
        return len(self.qubits)

    @property
    def is_pauli(self) -> bool:
        return self.pauli is not None

    @property
    def body(self) -> np.ndarray:
        if self.pauli is not None:
            return pauli_word_matrix(self.pauli)
        return self.matrix

    @property
    def operator(self) -> np.ndarray:
        """``weight * body`` as a dense block."""
        return self.weight * self.body

    def basis_expectation(self, mask: int) -> float:
        """⟨b|h|b⟩ for the computational basis state with index ``mask``."""
        if self.pauli is not None:
            if any(letter != "Z" for letter in self.pauli):
                return 0.0
            parity = sum((mask >> q) & 1 for q in self.qubits) % 2
            return -self.weight if parity else self.weight
        row = local_index(mask, self.qubits)
        return self.weight * float(self.matrix[row, row].real)


@dataclass(frozen=True, eq=False)
class LocalHamiltonian:
    """H = Σ_α h_α on ``n`` qubits with its interaction statistics.

    ``k`` is the largest term support, ``M`` the sum of term norms, ``e[s]`` the summed
    norm of terms touching site ``s`` and ``L`` the sum of ``e``.
    """

    n: int
    terms: Tuple[LocalTerm, ...]
    k: int = field(init=False)
    M: float = field(init=False)
    e: np.ndarray = field(init=False, repr=False)
    L: float = field(init=False)

    def __post_init__(self):
        if int(self.n) <= 0:
            raise InvalidInstanceError(f"Qubit count must be positive, got {self.n}")
        terms = tuple(self.terms)
        if not terms:
            raise InvalidInstanceError("Empty term list")
        for term in terms:
            if term.qubits[-1] >= self.n:
                raise InvalidInstanceError(
                    f"Term on {list(term.qubits)} exceeds qubit range [0, {self.n})"
                )
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "terms", terms)
        e, L, M = _statistics(self.n, terms)
        object.__setattr__(self, "k", max(term.size for term in terms))
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "L", L)

    @property
    def m(self) -> int:
        return len(self.terms)


def _statistics(n: int, terms: Sequence[LocalTerm]) -> Tuple[np.ndarray, float, float]:
    e = np.zeros(n)
    for term in terms:
        e[list(term.qubits)] += term.norm
    e.setflags(write=False)
    M = math.fsum(term.norm for term in terms)
    return e, math.fsum(e), M


def term_norm(term: LocalTerm) -> float:
    """Spectral norm ‖weight·body‖; exactly |weight| for a Pauli word."""
    return term.norm


def site_statistics(H: LocalHamiltonian) -> Tuple[np.ndarray, float, float]:
    """Return ``(e, L, M)`` recomputed from the terms."""
    e, L, M = _statistics(H.n, H.terms)
    if L > H.k * M * (1 + 1e-12) + 1e-12:
        raise InvalidInstanceError(f"Site statistics broken: L={L} > k*M={H.k * M}")
    return e, L, M


def _parse_matrix(raw: Any, dim: int) -> np.ndarray:
    try:
        arr = np.asarray(raw, dtype=float)
    except (TypeError, ValueError):
        raise InvalidInstanceError("Dense body must be numeric")
    if arr.shape == (dim, dim, 2):
        return arr[..., 0] + 1j * arr[..., 1]
    if arr.shape == (dim * dim, 2):
        return (arr[:, 0] + 1j * arr[:, 1]).reshape(dim, dim)
    if arr.shape == (dim, dim):
        return arr.astype(complex)
    raise InvalidInstanceError(f"Dense body has shape {arr.shape}, expected {dim}x{dim} entries")


def _parse_term(raw: Mapping[str, Any]) -> LocalTerm:
    if not isinstance(raw, Mapping):
        raise InvalidInstanceError(f"Term must be an object, got {type(raw).__name__}")
    if "qubits" not in raw:
        raise InvalidInstanceError("Term is missing 'qubits'")
    qubits = raw["qubits"]
    if not isinstance(qubits, list) or not all(isinstance(q, int) for q in qubits):
        raise InvalidInstanceError(f"Term qubits must be a list of integers, got {qubits!r}")
    if len(set(qubits)) != len(qubits):
        raise InvalidInstanceError(f"Duplicate qubit index in term {qubits}")
    has_pauli, has_matrix = "pauli" in raw, "matrix" in raw
    if has_pauli == has_matrix:
        raise InvalidInstanceError("Term needs exactly one of 'pauli' and 'matrix'")
    try:
        weight = float(raw.get("weight", 1.0))
    except (TypeError, ValueError):
        raise InvalidInstanceError(f"Term weight must be a number, got {raw.get('weight')!r}")
    if has_pauli:
        return LocalTerm(qubits=tuple(qubits), pauli=str(raw["pauli"]), weight=weight)
    matrix = _parse_matrix(raw["matrix"], 2 ** len(qubits))
    return LocalTerm(qubits=tuple(qubits), matrix=matrix, weight=weight)


def parse_hamiltonian(document: Union[str, bytes, Mapping[str, Any]]) -> LocalHamiltonian:
    """Build a validated Hamiltonian from its JSON document (text or parsed mapping)."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise InvalidInstanceError(f"Malformed Hamiltonian document: {e}")
    if not isinstance(document, Mapping):
        raise InvalidInstanceError("Hamiltonian document must be a JSON object")
    n = document.get("n")
    if not isinstance(n, int) or isinstance(n, bool):
        raise InvalidInstanceError(f"'n' must be an integer, got {n!r}")
    if n <= 0:
        raise InvalidInstanceError(f"Qubit count must be positive, got {n}")
    raw_terms = document.get("terms")
    if not isinstance(raw_terms, list):
        raise InvalidInstanceError("'terms' must be a list")
    if not raw_terms:
        raise InvalidInstanceError("Empty term list")
    return LocalHamiltonian(n=n, terms=tuple(_parse_term(raw) for raw in raw_terms))


def hamiltonian_to_document(H: LocalHamiltonian) -> Dict[str, Any]:
    """Inverse of :func:`parse_hamiltonian`."""
    terms: List[Dict[str, Any]] = []
    for term in H.terms:
        entry: Dict[str, Any] = {"qubits": list(term.qubits), "weight": term.weight}
        if term.is_pauli:
            entry["pauli"] = term.pauli
        else:
            entry["matrix"] = [
                [[float(z.real), float(z.imag)] for z in row] for row in term.matrix
            ]
        terms.append(entry)
    return {"n": H.n, "terms": terms}


def load_hamiltonian(path: str) -> LocalHamiltonian:
    with open(path, "r", encoding="utf-8") as f:
        return parse_hamiltonian(f.read())


def random_local_hamiltonian(
    n: int, k: int, m: int, rng: np.random.Generator, weights: str = "pm1"
) -> LocalHamiltonian:
    """Random k-local instance: uniform k-subsets, uniform Pauli words, random weights."""
    if n < 1 or k < 1 or m < 1:
        raise InvalidParameterError(f"Need n, k, m >= 1, got n={n}, k={k}, m={m}")
    if k > n:
        raise InvalidParameterError(f"Locality k={k} exceeds qubit count n={n}")
    if weights not in WEIGHT_DISTRIBUTIONS:
        raise InvalidParameterError(
            f"Unknown weight distribution {weights!r}; choose from {WEIGHT_DISTRIBUTIONS}"
        )
    terms = []
    for _ in range(m):
        qubits = tuple(sorted(int(q) for q in rng.choice(n, size=k, replace=False)))
        word = "".join(rng.choice(["X", "Y", "Z"], size=k))
        if weights == "pm1":
            weight = float(rng.choice([-1.0, 1.0]))
        elif weights == "uniform":
            weight = float(rng.uniform(-1.0, 1.0))
        else:
            weight = float(rng.normal())
        terms.append(LocalTerm(qubits=qubits, pauli=word, weight=weight))
    return LocalHamiltonian(n=n, terms=tuple(terms))


def assemble_matrix(H: LocalHamiltonian, cap: Optional[int] = None) -> np.ndarray:
    """Dense 2^n x 2^n matrix of H (the desk-scale oracle)."""
    cap = get_oracle_cap(cap)
    if H.n > cap:
        raise ScaleExceededError(H.n, cap)
    dim = 2**H.n
    identity = np.eye(dim, dtype=complex)
    matrix = np.zeros((dim, dim), dtype=complex)
    for term in H.terms:
        matrix += term.weight * apply_local(identity, term.body, term.qubits, H.n)
    return matrix


def expectation(H: LocalHamiltonian, state: np.ndarray) -> float:
    """⟨ψ|H|ψ⟩ summed term by term, without assembling H."""
    state = np.asarray(state, dtype=complex)
    if state.shape != (2**H.n,):
        raise InvalidParameterError(
            f"State has shape {state.shape}, expected ({2 ** H.n},) for {H.n} qubits"
        )
    total = 0.0
    for term in H.terms:
        image = apply_local(state, term.body, term.qubits, H.n)
        total += term.weight * float(np.vdot(state, image).real)
    return total


def basis_energy(H: LocalHamiltonian, mask: int) -> float:
    """⟨b|H|b⟩ for a computational basis state, in O(m) time."""
    return math.fsum(term.basis_expectation(mask) for term in H.terms)


def _embed(body: np.ndarray, qubits: Sequence[int], position: Mapping[int, int]) -> np.ndarray:
    size = len(position)
    local = [size - 1 - position[q] for q in qubits]
    return apply_local(np.eye(2**size, dtype=complex), body, local, size)


def conjugate_by_circuit(H: LocalHamiltonian, circuit, cap: Optional[int] = None) -> LocalHamiltonian:
    """H_d = U† H U term by term, each term supported on its light cone.

    Terms no gate reaches are kept as they are. Norms carry over unchanged.
    """
    from .depthd import lightcone_support

    if circuit.n != H.n:
        raise InvalidInstanceError(
            f"Circuit acts on {circuit.n} qubits but the Hamiltonian has {H.n}"
        )
    cap = get_oracle_cap(cap)
    terms = []
    for term in H.terms:
        support = lightcone_support(circuit, term.qubits)
        if len(support) > cap:
            raise ScaleExceededError(len(support), cap, what="light-cone")
        position = {q: i for i, q in enumerate(support)}
        op = _embed(term.body, term.qubits, position)
        reached = set(term.qubits)
        touched = False
        for layer in reversed(circuit.layers):
            grown = set()
            for gate in layer:
                if reached.intersection(gate.pair):
                    g = _embed(gate.unitary, gate.pair, position)
                    op = g.conj().T @ op @ g
                    grown.update(gate.pair)
                    touched = True
            reached |= grown
        if not touched:
            terms.append(term)
            continue
        op = 0.5 * (op + op.conj().T)
        terms.append(
            LocalTerm(qubits=support, matrix=op, weight=term.weight, known_norm=term.norm)
        )
    logger.debug(
        "Conjugated %d terms, max support %d -> %d",
        H.m,
        H.k,
        max(term.size for term in terms),
    )
    return LocalHamiltonian(n=H.n, terms=tuple(terms))
