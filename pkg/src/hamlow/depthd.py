"""Depth-d brickwork circuits, light cones and variational bounds on E_d.

A depth-d state is U_d|0…0⟩ for a circuit of d layers of disjoint two-qubit gates.
Every gate is U = exp(i Σ_j θ_j P_j) over the 15 non-identity two-qubit Pauli words,
so all-zero parameters give the identity.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg
from scipy.optimize import minimize_scalar

from .config import get_oracle_cap
from .errors import InvalidInstanceError, InvalidParameterError, ScaleExceededError
from .hamiltonian import (
    LocalHamiltonian,
    apply_local,
    assemble_matrix,
    basis_energy,
    expectation,
    pauli_word_matrix,
)

logger = logging.getLogger(__name__)

GATE_PARAMS = 15
UNITARY_TOL = 1e-10

GENERATOR_WORDS = tuple(a + b for a in "IXYZ" for b in "IXYZ")[1:]
_GENERATORS = np.array([pauli_word_matrix(word) for word in GENERATOR_WORDS])

Layout = List[List[Tuple[int, int]]]


def gate_unitary(params: Sequence[float]) -> np.ndarray:
    """exp(i Σ_j θ_j P_j) for the 15 generator words."""
    theta = np.asarray(params, dtype=float)
    if theta.shape != (GATE_PARAMS,):
        raise InvalidParameterError(
            f"A two-qubit gate takes {GATE_PARAMS} parameters, got {theta.shape}"
        )
    return linalg.expm(1j * np.tensordot(theta, _GENERATORS, axes=1))


@dataclass(frozen=True, eq=False)
class Gate:
    """A two-qubit gate, given by its 15 parameters or by an explicit 4x4 unitary.

    ``pair[0]`` is the most significant factor of the 4x4 matrix.
    """

    pair: Tuple[int, int]
    params: Optional[Tuple[float, ...]] = None
    matrix: Optional[np.ndarray] = None
    unitary: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        pair = tuple(int(q) for q in self.pair)
        if len(pair) != 2 or pair[0] == pair[1] or min(pair) < 0:
            raise InvalidInstanceError(f"Gate needs two distinct qubits, got {list(self.pair)}")
        object.__setattr__(self, "pair", pair)
        if self.params is not None and self.matrix is not None:
            raise InvalidInstanceError("Gate takes 'params' or 'matrix', not both")
        if self.matrix is not None:
            unitary = np.array(self.matrix, dtype=complex)
            if unitary.shape != (4, 4):
                raise InvalidInstanceError(f"Gate matrix must be 4x4, got {unitary.shape}")
            if np.max(np.abs(unitary.conj().T @ unitary - np.eye(4))) > UNITARY_TOL:
                raise InvalidInstanceError(f"Gate on {list(pair)} is not unitary")
        else:
            params = self.params if self.params is not None else (0.0,) * GATE_PARAMS
            params = tuple(float(p) for p in params)
            object.__setattr__(self, "params", params)
            unitary = gate_unitary(params)
        unitary.setflags(write=False)
        object.__setattr__(self, "unitary", unitary)


@dataclass(frozen=True, eq=False)
class BrickworkCircuit:
    """``len(layers)`` layers of disjoint two-qubit gates on ``n`` qubits."""

    n: int
    layers: Tuple[Tuple[Gate, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise InvalidInstanceError(f"Circuit needs at least one qubit, got {self.n}")
        layers = tuple(tuple(layer) for layer in self.layers)
        for index, layer in enumerate(layers):
            used = set()
            for gate in layer:
                if max(gate.pair) >= self.n:
                    raise InvalidInstanceError(
                        f"Gate on {list(gate.pair)} exceeds qubit range [0, {self.n})"
                    )
                if used.intersection(gate.pair):
                    raise InvalidInstanceError(f"Layer {index} has overlapping gates")
                used.update(gate.pair)
        object.__setattr__(self, "layers", layers)

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def layout(self) -> Layout:
        return [[gate.pair for gate in layer] for layer in self.layers]

    def parameters(self) -> np.ndarray:
        """Gate parameters as a (gates, 15) array in layer order."""
        rows = []
        for layer in self.layers:
            for gate in layer:
                if gate.params is None:
                    raise InvalidParameterError(
                        f"Gate on {list(gate.pair)} is given by a matrix, not parameters"
                    )
                rows.append(gate.params)
        return np.array(rows, dtype=float).reshape(-1, GATE_PARAMS)


def brickwork_layout(n: int, depth: int) -> Layout:
    """Standard brick pattern on a line: even layers pair (0,1),(2,3)…, odd ones (1,2),(3,4)…"""
    if depth < 0:
        raise InvalidParameterError(f"Depth must be non-negative, got {depth}")
    return [[(i, i + 1) for i in range(layer % 2, n - 1, 2)] for layer in range(depth)]


def circuit_from_params(n: int, layout: Layout, params: np.ndarray) -> BrickworkCircuit:
    params = np.asarray(params, dtype=float).reshape(-1, GATE_PARAMS)
    rows = iter(params)
    layers = [tuple(Gate(pair=pair, params=tuple(next(rows))) for pair in layer) for layer in layout]
    return BrickworkCircuit(n=n, layers=tuple(layers))


def identity_circuit(n: int, depth: int, layout: Optional[Layout] = None) -> BrickworkCircuit:
    layout = layout if layout is not None else brickwork_layout(n, depth)
    gates = sum(len(layer) for layer in layout)
    return circuit_from_params(n, layout, np.zeros((gates, GATE_PARAMS)))


def random_circuit(
    n: int,
    depth: int,
    rng: np.random.Generator,
    layout: Optional[Layout] = None,
    scale: float = np.pi,
) -> BrickworkCircuit:
    layout = layout if layout is not None else brickwork_layout(n, depth)
    gates = sum(len(layer) for layer in layout)
    return circuit_from_params(n, layout, rng.uniform(-scale, scale, size=(gates, GATE_PARAMS)))


def pad_circuit(circuit: BrickworkCircuit, depth: int) -> BrickworkCircuit:
    """Extend a circuit to ``depth`` layers with identity gates on the brick pattern."""
    if depth < circuit.depth:
        raise InvalidParameterError(f"Cannot pad depth {circuit.depth} down to {depth}")
    extra = brickwork_layout(circuit.n, depth)[circuit.depth :]
    padding = tuple(tuple(Gate(pair=pair) for pair in layer) for layer in extra)
    return BrickworkCircuit(n=circuit.n, layers=circuit.layers + padding)


def zero_state(n: int) -> np.ndarray:
    state = np.zeros(2**n, dtype=complex)
    state[0] = 1.0
    return state


def apply_circuit(
    circuit: BrickworkCircuit, state: np.ndarray, cap: Optional[int] = None
) -> np.ndarray:
    """Apply the layers in order to a statevector."""
    cap = get_oracle_cap(cap)
    if circuit.n > cap:
        raise ScaleExceededError(circuit.n, cap)
    state = np.array(state, dtype=complex)
    if state.shape != (2**circuit.n,):
        raise InvalidParameterError(
            f"State has shape {state.shape}, expected ({2 ** circuit.n},)"
        )
    for layer in circuit.layers:
        for gate in layer:
            state = apply_local(state, gate.unitary, gate.pair, circuit.n)
    return state


def lightcone_support(circuit: BrickworkCircuit, qubits: Sequence[int]) -> Tuple[int, ...]:
    """Sites reachable backward through the layers from ``qubits``."""
    reached = set(int(q) for q in qubits)
    for layer in reversed(circuit.layers):
        grown = set()
        for gate in layer:
            if reached.intersection(gate.pair):
                grown.update(gate.pair)
        reached |= grown
    return tuple(sorted(reached))


def energy_zero_state(H: LocalHamiltonian) -> float:
    """E_0 = ⟨0…0|H|0…0⟩, summed term by term."""
    return basis_energy(H, 0)


def circuit_energy(H: LocalHamiltonian, circuit: BrickworkCircuit, cap: Optional[int] = None) -> float:
    """⟨0|C† H C|0⟩ by statevector simulation."""
    return expectation(H, apply_circuit(circuit, zero_state(circuit.n), cap=cap))


def parse_circuit(document: Mapping[str, Any]) -> BrickworkCircuit:
    if not isinstance(document, Mapping) or "n" not in document or "layers" not in document:
        raise InvalidInstanceError("Circuit document needs 'n' and 'layers'")
    layers = []
    for layer in document["layers"]:
        gates = []
        for raw in layer:
            if "matrix" in raw:
                matrix = np.asarray(raw["matrix"], dtype=float)
                if matrix.shape == (4, 4, 2):
                    matrix = matrix[..., 0] + 1j * matrix[..., 1]
                gates.append(Gate(pair=tuple(raw["pair"]), matrix=matrix))
            else:
                gates.append(Gate(pair=tuple(raw["pair"]), params=tuple(raw["params"])))
        layers.append(tuple(gates))
    return BrickworkCircuit(n=int(document["n"]), layers=tuple(layers))


def circuit_to_document(circuit: BrickworkCircuit) -> Dict[str, Any]:
    layers = []
    for layer in circuit.layers:
        gates = []
        for gate in layer:
            if gate.params is not None:
                gates.append({"pair": list(gate.pair), "params": list(gate.params)})
            else:
                gates.append(
                    {
                        "pair": list(gate.pair),
                        "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in gate.matrix],
                    }
                )
        layers.append(gates)
    return {"n": circuit.n, "layers": layers}


@dataclass
class OptimizerConfig:
    """Settings for the coordinate-descent search over gate parameters."""

    restarts: int = 8
    sweeps: int = 200
    plateau: float = 1e-8
    seed: int = 0
    workers: int = 1
    init_scale: float = np.pi
    line_width: float = np.pi
    xatol: float = 1e-9
    layout: Optional[Layout] = None

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "OptimizerConfig":
        known = {name: data[name] for name in cls.__dataclass_fields__ if name in data}
        if known.get("layout") is not None:
            known["layout"] = [[tuple(pair) for pair in layer] for layer in known["layout"]]
        config = cls(**known)
        if config.restarts < 1 or config.sweeps < 1 or config.workers < 1:
            raise InvalidParameterError("restarts, sweeps and workers must be positive")
        return config

    def to_dict(self) -> Dict[str, Any]:
        return {
            "restarts": self.restarts,
            "sweeps": self.sweeps,
            "plateau": self.plateau,
            "seed": self.seed,
            "workers": self.workers,
            "init_scale": self.init_scale,
            "line_width": self.line_width,
            "xatol": self.xatol,
            "layout": self.layout,
        }


@dataclass
class DepthBound:
    """Best variational upper bound on E_d and the circuit reaching it."""

    d: int
    energy_upper: float
    circuit: BrickworkCircuit
    optimizer_trace: List[Dict[str, Any]] = field(default_factory=list)
    restart: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d": self.d,
            "energy_upper": self.energy_upper,
            "restart": self.restart,
            "circuit": circuit_to_document(self.circuit),
            "optimizer_trace": self.optimizer_trace,
        }


def _conjugate_dense(matrix: np.ndarray, unitary: np.ndarray, pair: Tuple[int, int], n: int) -> np.ndarray:
    """G† A G for a gate G on ``pair``."""
    dagger = unitary.conj().T
    left = apply_local(matrix, dagger, pair, n)
    return apply_local(left.conj().T, dagger, pair, n).conj().T


def _descend(
    hmat: np.ndarray,
    n: int,
    pairs: List[Tuple[int, int]],
    start: np.ndarray,
    cfg: OptimizerConfig,
    restart: int,
) -> Tuple[float, np.ndarray, List[Dict[str, Any]]]:
    params = np.array(start, dtype=float)
    unitaries = [gate_unitary(row) for row in params]
    initial = zero_state(n)

    def total_energy() -> float:
        state = initial
        for pair, unitary in zip(pairs, unitaries):
            state = apply_local(state, unitary, pair, n)
        return float(np.vdot(state, hmat @ state).real)

    energy = total_energy()
    trace = [{"restart": restart, "sweep": 0, "energy": energy}]
    for sweep in range(1, cfg.sweeps + 1):
        suffix = [None] * len(pairs)
        acc = hmat
        for g in range(len(pairs) - 1, -1, -1):
            suffix[g] = acc
            acc = _conjugate_dense(acc, unitaries[g], pairs[g], n)

        before = energy
        state = initial
        for g, pair in enumerate(pairs):
            effective = suffix[g]
            row = params[g].copy()

            def gate_energy(theta: float, j: int) -> float:
                trial = row.copy()
                trial[j] = theta
                phi = apply_local(state, gate_unitary(trial), pair, n)
                return float(np.vdot(phi, effective @ phi).real)

            for j in range(GATE_PARAMS):
                result = minimize_scalar(
                    gate_energy,
                    bounds=(row[j] - cfg.line_width, row[j] + cfg.line_width),
                    args=(j,),
                    method="bounded",
                    options={"xatol": cfg.xatol},
                )
                if result.fun < energy:
                    row[j] = result.x
                    energy = float(result.fun)
            params[g] = row
            unitaries[g] = gate_unitary(row)
            state = apply_local(state, unitaries[g], pair, n)

        energy = total_energy()
        trace.append({"restart": restart, "sweep": sweep, "energy": energy})
        logger.debug("restart %d sweep %d energy %.12f", restart, sweep, energy)
        if before - energy < cfg.plateau:
            break
    return energy, params, trace


def optimize_depth_d(
    H: LocalHamiltonian,
    d: int,
    cfg: Optional[OptimizerConfig] = None,
    initial: Optional[BrickworkCircuit] = None,
    cap: Optional[int] = None,
) -> DepthBound:
    """Multi-start coordinate descent for an upper bound on E_d.

    Restart 0 starts at the identity (or at ``initial`` padded to depth ``d``), so the
    result never exceeds E_0, nor the energy of ``initial``.
    """
    if d < 0:
        raise InvalidParameterError(f"Depth must be non-negative, got {d}")
    cfg = cfg or OptimizerConfig()
    e0 = energy_zero_state(H)
    if d == 0:
        return DepthBound(
            d=0,
            energy_upper=e0,
            circuit=identity_circuit(H.n, 0),
            optimizer_trace=[{"restart": 0, "sweep": 0, "energy": e0}],
        )

    cap = get_oracle_cap(cap)
    if H.n > cap:
        raise ScaleExceededError(H.n, cap)
    if initial is not None:
        seeded = pad_circuit(initial, d)
        layout = seeded.layout
        first = seeded.parameters()
    else:
        layout = cfg.layout if cfg.layout is not None else brickwork_layout(H.n, d)
        if len(layout) != d:
            raise InvalidParameterError(f"Layout has {len(layout)} layers, expected {d}")
        first = None
    # validates the layout against n
    reference = identity_circuit(H.n, d, layout)
    pairs = [pair for layer in layout for pair in layer]
    if first is None:
        first = np.zeros((len(pairs), GATE_PARAMS))

    starts = [first]
    for restart in range(1, cfg.restarts):
        rng = np.random.default_rng([cfg.seed, restart])
        starts.append(rng.uniform(-cfg.init_scale, cfg.init_scale, size=(len(pairs), GATE_PARAMS)))

    hmat = assemble_matrix(H, cap=cap)
    if not pairs:
        energy = circuit_energy(H, reference, cap=cap)
        return DepthBound(d=d, energy_upper=min(energy, e0), circuit=reference)

    def run(index: int):
        return _descend(hmat, H.n, pairs, starts[index], cfg, index)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(run, range(len(starts))))
    else:
        results = [run(index) for index in range(len(starts))]

    best = min(range(len(results)), key=lambda index: (results[index][0], index))
    circuit = circuit_from_params(H.n, layout, results[best][1])
    energy = circuit_energy(H, circuit, cap=cap)
    trace = [entry for result in results for entry in result[2]]
    if initial is not None:
        seeded_energy = circuit_energy(H, seeded, cap=cap)
        if energy > seeded_energy:
            circuit, energy = seeded, seeded_energy
    if energy > e0:
        logger.info("Optimizer did not improve on E_0; returning the identity circuit")
        circuit, energy = reference, e0
    logger.info("E_%d upper bound %.10f (E_0 = %.10f, restart %d)", d, energy, e0, best)
    return DepthBound(d=d, energy_upper=energy, circuit=circuit, optimizer_trace=trace, restart=best)
