import json

import numpy as np
import pytest

from hamlow import config
from hamlow.hamiltonian import LocalHamiltonian, LocalTerm, hamiltonian_to_document


@pytest.fixture(autouse=True)
def isolated_config(tmp_path, monkeypatch):
    """Keep every test away from the user's ~/.hamlow and the cap env var."""
    home = tmp_path / "hamlow-home"
    monkeypatch.setattr(config, "CONFIG_DIR", home)
    monkeypatch.setattr(config, "CONFIG_FILE", home / "config.yaml")
    monkeypatch.delenv(config.ORACLE_CAP_ENV, raising=False)
    return home


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pauli_hamiltonian(n, terms):
    """Build a Hamiltonian from ``(qubits, word, weight)`` triples."""
    return LocalHamiltonian(
        n=n,
        terms=tuple(LocalTerm(qubits=tuple(q), pauli=word, weight=w) for q, word, w in terms),
    )


def field(n, letter="Z", weight=1.0):
    """Σ_i weight·P_i."""
    return pauli_hamiltonian(n, [((i,), letter, weight) for i in range(n)])


def write_hamiltonian(path, H):
    path.write_text(json.dumps(hamiltonian_to_document(H)), encoding="utf-8")
    return str(path)
