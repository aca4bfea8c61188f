import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import field, pauli_hamiltonian
from hamlow.depthd import (
    BrickworkCircuit,
    Gate,
    OptimizerConfig,
    apply_circuit,
    brickwork_layout,
    circuit_energy,
    circuit_to_document,
    energy_zero_state,
    identity_circuit,
    lightcone_support,
    optimize_depth_d,
    pad_circuit,
    parse_circuit,
    random_circuit,
    zero_state,
)
from hamlow.errors import InvalidInstanceError, InvalidParameterError
from hamlow.spectrum import diagonalize, expectation_value, ground_energy

SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])

FAST = OptimizerConfig(restarts=2, sweeps=6, seed=3)


def ising_chain(n):
    terms = [((i, i + 1), "ZZ", 1.0) for i in range(n - 1)]
    terms += [((i,), "X", 0.8) for i in range(n)]
    return pauli_hamiltonian(n, terms)


def test_zero_parameters_give_identity():
    assert_allclose(Gate(pair=(0, 1)).unitary, np.eye(4), atol=1e-15)


def test_random_gate_is_unitary(rng):
    U = Gate(pair=(0, 1), params=tuple(rng.normal(size=15))).unitary
    assert_allclose(U.conj().T @ U, np.eye(4), atol=1e-10)


def test_gate_validation():
    with pytest.raises(InvalidInstanceError):
        Gate(pair=(1, 1))
    with pytest.raises(InvalidInstanceError):
        Gate(pair=(0, 1), matrix=np.ones((4, 4)))
    with pytest.raises(InvalidParameterError):
        Gate(pair=(0, 1), params=(0.0, 1.0))


def test_brickwork_layout():
    assert brickwork_layout(5, 2) == [[(0, 1), (2, 3)], [(1, 2), (3, 4)]]
    assert brickwork_layout(4, 0) == []


def test_overlapping_gates_rejected():
    layer = (Gate(pair=(0, 1)), Gate(pair=(1, 2)))
    with pytest.raises(InvalidInstanceError):
        BrickworkCircuit(n=3, layers=(layer,))


def test_identity_circuit_leaves_state(rng):
    state = rng.normal(size=16) + 1j * rng.normal(size=16)
    assert_allclose(apply_circuit(identity_circuit(4, 3), state), state, atol=1e-14)


def test_swap_moves_excitation():
    circuit = BrickworkCircuit(n=2, layers=((Gate(pair=(0, 1), matrix=SWAP),),))
    state = np.zeros(4)
    state[1] = 1.0  # site 0 flipped
    out = apply_circuit(circuit, state)
    assert_allclose(np.abs(out), [0, 0, 1, 0], atol=1e-15)


def test_random_circuit_preserves_norm(rng):
    circuit = random_circuit(6, 4, rng)
    out = apply_circuit(circuit, zero_state(6))
    assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-12)


def test_apply_circuit_dimension_mismatch():
    with pytest.raises(InvalidParameterError):
        apply_circuit(identity_circuit(3, 1), np.ones(4))


def test_lightcone_support():
    circuit = identity_circuit(6, 2)
    assert lightcone_support(circuit, [2]) == (0, 1, 2, 3)
    assert lightcone_support(identity_circuit(6, 0), [4]) == (4,)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_lightcone_growth_bound(rng, d):
    circuit = random_circuit(8, d, rng)
    for q in range(7):
        support = lightcone_support(circuit, [q, q + 1])
        assert len(support) <= min(8, 2**d * 2)


def test_energy_zero_state():
    assert energy_zero_state(field(3)) == 3.0
    assert energy_zero_state(field(3, weight=-1.0)) == -3.0
    assert energy_zero_state(field(3, letter="X")) == 0.0


def test_depth_zero_is_exact():
    H = ising_chain(4)
    bound = optimize_depth_d(H, 0)
    assert bound.energy_upper == energy_zero_state(H)
    assert bound.circuit.depth == 0


def test_negative_depth_rejected():
    with pytest.raises(InvalidParameterError):
        optimize_depth_d(field(2), -1)


@pytest.mark.parametrize("n", [4, 6])
def test_transverse_field_minimum_reached(n):
    H = field(n, letter="X", weight=-1.0)
    bound = optimize_depth_d(H, 1, OptimizerConfig(restarts=1, sweeps=20))
    assert bound.energy_upper == pytest.approx(-n, abs=1e-6)


def test_bound_sandwiched_by_oracle():
    H = ising_chain(6)
    bound = optimize_depth_d(H, 1, FAST)
    S = diagonalize(H, keep_vectors=True)
    assert ground_energy(S) - 1e-9 <= bound.energy_upper <= energy_zero_state(H) + 1e-9
    state = apply_circuit(bound.circuit, zero_state(6))
    assert expectation_value(S, state) == pytest.approx(bound.energy_upper, abs=1e-9)
    assert circuit_energy(H, bound.circuit) == pytest.approx(bound.energy_upper, abs=1e-9)


def test_seeded_deeper_run_never_worse():
    H = ising_chain(4)
    shallow = optimize_depth_d(H, 1, FAST)
    deeper = optimize_depth_d(H, 2, FAST, initial=shallow.circuit)
    assert deeper.energy_upper <= shallow.energy_upper + 1e-9


def test_parallel_restarts_match_serial():
    H = ising_chain(4)
    serial = optimize_depth_d(H, 1, FAST)
    parallel = optimize_depth_d(H, 1, OptimizerConfig(restarts=2, sweeps=6, seed=3, workers=2))
    assert parallel.energy_upper == pytest.approx(serial.energy_upper, abs=1e-12)
    assert parallel.restart == serial.restart


def test_trace_records_sweeps():
    bound = optimize_depth_d(ising_chain(4), 1, FAST)
    assert {entry["restart"] for entry in bound.optimizer_trace} == {0, 1}
    assert bound.optimizer_trace[0]["sweep"] == 0


def test_pad_circuit(rng):
    circuit = random_circuit(5, 1, rng)
    padded = pad_circuit(circuit, 3)
    assert padded.depth == 3
    assert_allclose(
        apply_circuit(padded, zero_state(5)), apply_circuit(circuit, zero_state(5)), atol=1e-12
    )
    with pytest.raises(InvalidParameterError):
        pad_circuit(padded, 1)


def test_circuit_document(rng):
    circuit = random_circuit(4, 2, rng)
    again = parse_circuit(circuit_to_document(circuit))
    assert again.layout == circuit.layout
    assert_allclose(again.parameters(), circuit.parameters())
    swap = BrickworkCircuit(n=2, layers=((Gate(pair=(0, 1), matrix=SWAP),),))
    document = circuit_to_document(swap)
    assert "matrix" in document["layers"][0][0]
    assert_allclose(parse_circuit(document).layers[0][0].unitary, SWAP)


def test_optimizer_config_from_mapping():
    cfg = OptimizerConfig.from_mapping({"restarts": 3, "layout": [[[0, 1]]], "unknown": 1})
    assert cfg.restarts == 3
    assert cfg.layout == [[(0, 1)]]
    with pytest.raises(InvalidParameterError):
        OptimizerConfig.from_mapping({"sweeps": 0})
