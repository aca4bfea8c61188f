import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import field
from hamlow.depthd import random_circuit
from hamlow.errors import InvalidParameterError, ScaleExceededError
from hamlow.hamiltonian import assemble_matrix, conjugate_by_circuit, random_local_hamiltonian
from hamlow.spectrum import (
    count_sweep,
    diagonalize,
    expectation_value,
    ground_energy,
    max_energy,
    projector_overlap,
    spectral_count,
    spectrum_rows,
)


def test_single_z():
    S = diagonalize(field(1))
    assert_allclose(S.eigenvalues, [-1.0, 1.0])
    assert ground_energy(S) == -1.0
    assert spectral_count(S, 0.0) == 1


def test_negative_field_spectrum():
    S = diagonalize(field(3, weight=-1.0))
    assert_allclose(S.eigenvalues, [-3, -1, -1, -1, 1, 1, 1, 3], atol=1e-12)


def test_count_by_hamming_weight():
    S = diagonalize(field(3))
    assert spectral_count(S, 0.0) == 4


def test_count_reaches_dimension(rng):
    S = diagonalize(random_local_hamiltonian(5, 3, 8, rng))
    assert spectral_count(S, max_energy(S)) == 32
    energies = np.linspace(ground_energy(S) - 1, max_energy(S) + 1, 50)
    counts = [spectral_count(S, E) for E in energies]
    assert counts == sorted(counts)


def test_count_stable_between_eigenvalues():
    S = diagonalize(field(3))
    for E in (-2.0, 0.0, 2.0):
        assert spectral_count(S, E) == spectral_count(S, E + S.tolerance / 2)


def test_trace_identity(rng):
    H = random_local_hamiltonian(8, 3, 16, rng)
    S = diagonalize(H)
    assert S.eigenvalues.sum() == pytest.approx(np.trace(assemble_matrix(H)).real, abs=1e-8)


def test_eigenvalues_bounded_by_total_strength(rng):
    H = random_local_hamiltonian(6, 3, 12, rng)
    S = diagonalize(H)
    assert np.max(np.abs(S.eigenvalues)) <= H.M + 1e-9


def test_eigenvectors_unitary(rng):
    S = diagonalize(random_local_hamiltonian(5, 2, 6, rng), keep_vectors=True)
    V = S.eigenvectors
    assert_allclose(V.conj().T @ V, np.eye(32), atol=1e-9)


def test_projector_overlap_of_ground_vector(rng):
    S = diagonalize(random_local_hamiltonian(5, 3, 8, rng), keep_vectors=True)
    ground = S.eigenvectors[:, 0]
    assert projector_overlap(ground, S, ground_energy(S)) == pytest.approx(1.0, abs=1e-12)


def test_projector_overlap_orthogonal_state():
    S = diagonalize(field(1), keep_vectors=True)
    up = np.array([1.0, 0.0])
    assert projector_overlap(up, S, -0.5) == pytest.approx(0.0, abs=1e-12)


def test_projector_overlap_full_range(rng):
    S = diagonalize(random_local_hamiltonian(4, 2, 6, rng), keep_vectors=True)
    state = rng.normal(size=16) + 1j * rng.normal(size=16)
    state /= np.linalg.norm(state)
    assert projector_overlap(state, S, max_energy(S)) == pytest.approx(1.0, abs=1e-12)


def test_projector_overlap_errors():
    S = diagonalize(field(2))
    with pytest.raises(InvalidParameterError):
        projector_overlap(np.ones(4) / 2, S, 0.0)
    S = diagonalize(field(2), keep_vectors=True)
    with pytest.raises(InvalidParameterError):
        projector_overlap(np.ones(8), S, 0.0)


def test_expectation_value_in_eigenbasis():
    S = diagonalize(field(2), keep_vectors=True)
    state = np.zeros(4)
    state[0] = 1.0
    assert expectation_value(S, state) == pytest.approx(2.0)


def test_conjugated_spectrum_matches(rng):
    H = random_local_hamiltonian(6, 2, 8, rng)
    H_d = conjugate_by_circuit(H, random_circuit(6, 2, rng))
    assert_allclose(diagonalize(H_d).eigenvalues, diagonalize(H).eigenvalues, atol=1e-9)


def test_oracle_cap():
    with pytest.raises(ScaleExceededError):
        diagonalize(field(4), cap=3)


def test_csv_exports():
    S = diagonalize(field(1))
    header, *rows = spectrum_rows(S).splitlines()
    assert header == "index,eigenvalue"
    assert [int(row.split(",")[0]) for row in rows] == [0, 1]
    assert [float(row.split(",")[1]) for row in rows] == pytest.approx([-1.0, 1.0])
    lines = count_sweep(S, [-2.0, 0.0, 1.0]).splitlines()
    assert lines == ["E,count", "-2.0,0", "0.0,1", "1.0,2"]
