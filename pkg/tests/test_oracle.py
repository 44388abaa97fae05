import numpy as np
import pytest

from spinchannel import DegenerateGroundState, ModelParams, SizeLimitExceeded
from spinchannel.oracle import (
    ed_echo,
    ed_environment_entropy,
    ed_ground_energy,
    ed_ground_state,
    ed_hamiltonian,
    random_cases,
    verify,
    von_neumann_entropy,
)


def test_frozen_ground_energies():
    assert ed_ground_energy(ModelParams(n_qubits=8, lam=1.0)) == pytest.approx(-9.83795144745942, abs=1e-10)
    assert ed_ground_energy(ModelParams(n_qubits=2, lam=0.0)) == pytest.approx(-1.0, abs=1e-12)


def test_hamiltonian_blocks_by_parity():
    p = ModelParams(n_qubits=4, lam=0.7, gamma=0.4)
    full = np.linalg.eigvalsh(ed_hamiltonian(p))
    parts = np.concatenate([np.linalg.eigvalsh(ed_hamiltonian(p, parity=q)) for q in (0, 1)])
    assert np.allclose(np.sort(parts), full)


def test_kronecker_construction_agrees():
    # independent build from Pauli matrices, site 1 as the leftmost factor
    L, lam, g, eps = 3, 0.6, 0.5, 0.3
    X = np.array([[0, 1], [1, 0]])
    Y = np.array([[0, -1j], [1j, 0]])
    Z = np.diag([1.0, -1.0])
    I = np.eye(2)

    def op(mats):
        out = np.array([[1.0]])
        for m in mats:
            out = np.kron(out, m)
        return out

    def at(site, m):
        return op([m if k == site else I for k in range(L)])

    H = np.zeros((8, 8), dtype=complex)
    for j in range(L - 1):
        H -= 0.5 * (1 + g) * at(j, X) @ at(j + 1, X)
        H -= 0.5 * (1 - g) * at(j, Y) @ at(j + 1, Y)
    for j in range(L):
        H -= (lam + (eps if j == 1 else 0.0)) * at(j, Z)
    # computational basis |1> = spin up = Z eigenvalue +1, i.e. index 0 of the Pauli basis
    perm = [int("".join("1" if b == "0" else "0" for b in f"{s:03b}"), 2) for s in range(8)]
    H = H[np.ix_(perm, perm)]
    p = ModelParams(n_qubits=3, lam=lam, gamma=g, epsilon=eps)
    assert np.allclose(ed_hamiltonian(p, {2}), H.real, atol=1e-12)
    assert np.abs(H.imag).max() == 0


def test_ground_state_is_normalized_eigenvector():
    p = ModelParams(n_qubits=5, lam=0.8)
    v = ed_ground_state(p)
    H = ed_hamiltonian(p)
    assert np.linalg.norm(v) == pytest.approx(1.0)
    assert np.allclose(H @ v, ed_ground_energy(p) * v, atol=1e-10)


def test_degenerate_ground_state_raises():
    with pytest.raises(DegenerateGroundState) as info:
        ed_ground_state(ModelParams(n_qubits=2, lam=0.0))
    assert len(info.value.candidates) == 2


def test_size_limit():
    with pytest.raises(SizeLimitExceeded):
        ed_ground_energy(ModelParams(n_qubits=15))
    with pytest.raises(SizeLimitExceeded):
        ed_environment_entropy(ModelParams(n_qubits=9), 1.0)


def test_echo_hermitian_and_unit_diagonal():
    p = ModelParams(n_qubits=3, lam=1.2, epsilon=0.4)
    a = ed_echo(p, "egg", "gee", 2.0)
    assert ed_echo(p, "gee", "egg", 2.0) == pytest.approx(np.conj(a))
    assert ed_echo(p, "egg", "egg", 2.0) == pytest.approx(1.0)


def test_entropy_helper():
    assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2.0)
    assert von_neumann_entropy(np.diag([1.0, 0.0])) == 0.0


def test_frozen_environment_entropy():
    p = ModelParams(n_qubits=4, lam=1.0)
    assert ed_environment_entropy(p.replace(epsilon=0.05), 1.0) == pytest.approx(0.0023992443145510315, abs=1e-10)
    assert ed_environment_entropy(p.replace(epsilon=0.5), 1.0) == pytest.approx(0.07140525659090166, abs=1e-10)


def test_random_cases_are_reproducible_and_in_range():
    a = random_cases(30, seed=7)
    b = random_cases(30, seed=7)
    assert [(p, x, y, t) for p, x, y, t in a] == [(p, x, y, t) for p, x, y, t in b]
    for p, x, y, t in a:
        assert p.chain_length <= 11
        assert 0 <= x < p.n_states and 0 <= y < p.n_states
        assert 0.0 <= t <= 10.0


def test_verify_small_batch():
    report = verify(count=20, seed=3)
    assert report.passed
    assert len(report.cases) == 20
    assert report.max_deviation <= 1e-8
