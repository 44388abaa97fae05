"""Brute-force many-body reference for the environment chain.

Basis states are integers over the chain's sigma^z product basis: site ``j``
(1-based) is bit ``L - j``, with a set bit meaning spin up. The exchange and
field terms preserve the number of up spins modulo two, so every Hamiltonian is
diagonalized sector by sector; this keeps the ground state well defined when the
two parity sectors are nearly degenerate (ordered Ising phase of a long chain).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DegenerateGroundState, SizeLimitExceeded
from .model import ModelParams, as_basis_string, perturbed_sites

MAX_ED_SITES = 14
MAX_ENTROPY_SITES = 10
MAX_ENTROPY_QUBITS = 8
GAP_TOL = 1e-10


def _check_size(params: ModelParams, limit: int = MAX_ED_SITES):
    if params.chain_length > limit:
        raise SizeLimitExceeded(f"ED oracle limited to L <= {limit}, got L={params.chain_length}")


def _sector(L: int, parity: int) -> np.ndarray:
    states = np.arange(2**L, dtype=np.int64)
    ones = np.zeros_like(states)
    for b in range(L):
        ones += (states >> b) & 1
    return states[(ones & 1) == parity]


def ed_hamiltonian(params: ModelParams, perturbed=frozenset(), parity=None) -> np.ndarray:
    """Dense spin Hamiltonian of the chain, optionally restricted to one parity sector.

    ``perturbed`` holds 1-based sites whose field is raised by ``epsilon``.
    Returns a real symmetric matrix in the (sector) computational basis.
    """
    L = params.chain_length
    J, g = params.coupling, params.gamma
    states = np.arange(2**L, dtype=np.int64) if parity is None else _sector(L, parity)
    index = np.full(2**L, -1, dtype=np.int64)
    index[states] = np.arange(len(states))
    dim = len(states)
    H = np.zeros((dim, dim))

    diag = np.zeros(dim)
    for j in range(1, L + 1):
        bit = (states >> (L - j)) & 1
        h = J * params.lam + (params.epsilon if j in perturbed else 0.0)
        diag -= h * (2 * bit - 1)
    H[np.diag_indices(dim)] = diag

    for b in range(1, L):
        if b in params.broken_bonds:
            continue
        mask = (1 << (L - b)) | (1 << (L - b - 1))
        pair = (states >> (L - b - 1)) & 3
        flipped = index[states ^ mask]
        # antiparallel pairs hop with -J, parallel pairs are created/annihilated with -J gamma
        amp = np.where((pair == 1) | (pair == 2), -J, -J * g)
        rows = np.arange(dim)
        H[rows, flipped] += amp
    return H


@dataclass
class EDGround:
    energy: float
    vector: np.ndarray
    parity: int
    states: np.ndarray


def _ground(params: ModelParams) -> EDGround:
    _check_size(params)
    L = params.chain_length
    best = []
    for parity in (0, 1):
        H = ed_hamiltonian(params, parity=parity)
        w, v = sla.eigh(H, subset_by_index=[0, min(1, len(H) - 1)])
        best.append((w, v[:, 0], parity))
    best.sort(key=lambda item: item[0][0])
    (w0, v0, p0), (w1, _, _) = best
    second = min(w1[0], w0[1]) if len(w0) > 1 else w1[0]
    if second - w0[0] < GAP_TOL:
        raise DegenerateGroundState(
            f"ED ground state not unique: gap {second - w0[0]:.3e} < {GAP_TOL} (L={L}, lam={params.lam})",
            candidates=(float(w0[0]), float(second)),
        )
    return EDGround(float(w0[0]), v0, p0, _sector(L, p0))


def ed_ground_state(params: ModelParams) -> np.ndarray:
    """Ground state as a full ``2**L`` vector (real, unit norm)."""
    gs = _ground(params)
    out = np.zeros(2**params.chain_length)
    out[gs.states] = gs.vector
    return out


def ed_ground_energy(params: ModelParams) -> float:
    """Lowest many-body energy; well defined even when the ground state is degenerate."""
    _check_size(params)
    return float(min(sla.eigh(ed_hamiltonian(params, parity=p), eigvals_only=True, subset_by_index=[0, 0])[0]
                     for p in (0, 1)))


class _Evolver:
    """Conditional evolutions inside the ground-state parity sector."""

    def __init__(self, params: ModelParams):
        self.params = params
        self.gs = _ground(params)
        self._eig = {}

    def _spectrum(self, x):
        sites = perturbed_sites(self.params, x)
        if sites not in self._eig:
            H = ed_hamiltonian(self.params, sites, parity=self.gs.parity)
            w, V = np.linalg.eigh(H)
            self._eig[sites] = (w, V, V.T @ self.gs.vector)
        return self._eig[sites]

    def evolved(self, x, t: float) -> np.ndarray:
        """``exp(-i H_x t) |phi>`` in the sector basis."""
        w, V, c = self._spectrum(x)
        return V @ (np.exp(-1j * w * t) * c)


def ed_echo(params: ModelParams, x, y, t: float) -> complex:
    """``<phi| exp(i H_x t) exp(-i H_y t) |phi>`` from full diagonalization."""
    n = params.n_qubits
    x, y = as_basis_string(x, n), as_basis_string(y, n)
    ev = _Evolver(params)
    return complex(np.vdot(ev.evolved(x, t), ev.evolved(y, t)))


def von_neumann_entropy(rho: np.ndarray, floor: float = 1e-12) -> float:
    """Base-2 entropy; eigenvalues below ``floor`` count as zero."""
    p = np.linalg.eigvalsh(rho)
    p = p[p > floor]
    return float(-(p * np.log2(p)).sum())


def ed_environment_entropy(params: ModelParams, t: float) -> float:
    """Entropy of ``(1/N) sum_x U_x |phi><phi| U_x^dag`` built from evolved state vectors."""
    if params.chain_length > MAX_ENTROPY_SITES or params.n_qubits > MAX_ENTROPY_QUBITS:
        raise SizeLimitExceeded(
            f"environment entropy oracle needs L <= {MAX_ENTROPY_SITES} and n <= {MAX_ENTROPY_QUBITS}"
        )
    ev = _Evolver(params)
    N = params.n_states
    dim = len(ev.gs.states)
    sigma = np.zeros((dim, dim), dtype=complex)
    for code in range(N):
        psi = ev.evolved(code, t)
        sigma += np.outer(psi, psi.conj())
    return von_neumann_entropy(sigma / N)


@dataclass
class OracleCase:
    params: ModelParams
    x: int
    y: int
    t: float
    reference: complex
    value: complex

    @property
    def deviation(self) -> float:
        return abs(self.reference - self.value)


@dataclass
class OracleReport:
    cases: list
    tolerance: float

    @property
    def max_deviation(self) -> float:
        return max((c.deviation for c in self.cases), default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_deviation <= self.tolerance


DEFAULT_LAMBDAS = (0.25, 0.9, 1.0, 1.1, 2.0)
DEFAULT_GAMMAS = (1.0, 0.5)


def random_cases(count: int, seed: int, max_qubits: int = 8, spacings=(0, 1), max_sites: int = 11,
                 lambdas=DEFAULT_LAMBDAS, gammas=DEFAULT_GAMMAS, t_max: float = 10.0,
                 epsilon_range=(0.05, 1.0)):
    """Random ``(params, x, y, t)`` draws kept within the ED size limit."""
    rng = np.random.default_rng(seed)
    shapes = [(n, m) for m in spacings for n in range(1, max_qubits + 1) if n + (n - 1) * m <= max_sites]
    out = []
    for _ in range(count):
        n, m = shapes[rng.integers(len(shapes))]
        params = ModelParams(
            n_qubits=int(n),
            spacing=int(m),
            gamma=float(rng.choice(gammas)),
            lam=float(rng.choice(lambdas)),
            epsilon=float(rng.uniform(*epsilon_range)),
        )
        x, y = (int(v) for v in rng.integers(0, 2**n, size=2))
        out.append((params, x, y, float(rng.uniform(0.0, t_max))))
    return out


def verify(cases=None, count: int = 200, seed: int = 2024, tolerance: float = 1e-8) -> OracleReport:
    """Compare the determinant echo with ED on ``cases`` (random by default)."""
    from .echo import EchoEngine

    if cases is None:
        cases = random_cases(count, seed)
    engines, evolvers, results = {}, {}, []
    for params, x, y, t in cases:
        if params not in engines:
            engines[params] = EchoEngine(params)
            evolvers[params] = _Evolver(params)
        ev = evolvers[params]
        n = params.n_qubits
        ref = complex(np.vdot(ev.evolved(as_basis_string(x, n), t), ev.evolved(as_basis_string(y, n), t)))
        val = engines[params].echo(x, y, t)
        results.append(OracleCase(params, int(x), int(y), t, ref, val))
    return OracleReport(results, tolerance)
