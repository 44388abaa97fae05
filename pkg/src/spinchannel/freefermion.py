"""Jordan-Wigner free-fermion representation of the XY environment chain.

With ``c_k`` the Jordan-Wigner fermions (``sigma^z = 2 c^dag c - 1``, so a
filled mode is spin up) and the Nambu vector ``Psi = (c_1..c_L, c_1^dag..c_L^dag)``,
every conditional chain Hamiltonian is exactly

    H_chain = 1/2 Psi^dag M Psi,      M = [[A, B], [-B, -A]],

with no additive constant: the ``+h`` left over from ``-h sigma^z`` cancels the
``-1/2 Tr A`` produced by symmetrising the particle/hole blocks. ``M`` is the
"double-counted" single-particle matrix; its eigenvalues are the quasiparticle
energies ``+-E_k`` and the many-body ground energy is ``-1/2 sum_k E_k``.
"""
from __future__ import annotations

import numpy as np

from .errors import DegenerateGroundState, NumericalFailure
from .model import Chain, ModelParams

ZERO_MODE_TOL = 1e-10


def _as_chain(obj) -> Chain:
    return obj.chain() if isinstance(obj, ModelParams) else obj


def nambu_matrix(chain: Chain, sites=()) -> np.ndarray:
    """Real symmetric ``2L x 2L`` matrix ``M`` for the chain with 0-based ``sites`` perturbed."""
    L = chain.n_sites
    J, g = chain.coupling, chain.gamma
    A = np.zeros((L, L))
    B = np.zeros((L, L))
    for b, on in enumerate(chain.active_bonds):
        if on:
            A[b, b + 1] = A[b + 1, b] = -J
            B[b, b + 1] = -J * g
            B[b + 1, b] = J * g
    field = np.full(L, J * chain.lam)
    for s in sites:
        if not 0 <= s < L:
            raise ValueError(f"site {s} outside the chain (0..{L - 1})")
        field[s] += chain.epsilon
    A[np.diag_indices(L)] = -2.0 * field
    return np.block([[A, B], [-B, -A]])


def build_nambu(params: ModelParams, perturbed=frozenset()) -> np.ndarray:
    """Nambu matrix of the chain with the 1-based ``perturbed`` sites shifted by ``-eps sigma^z``."""
    L = params.chain_length
    bad = [s for s in perturbed if not 1 <= s <= L]
    if bad:
        raise ValueError(f"perturbed sites {sorted(bad)} outside 1..{L}")
    return nambu_matrix(params.chain(), sorted(s - 1 for s in perturbed))


def eigh(M: np.ndarray, context=None):
    try:
        return np.linalg.eigh(M)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"eigendecomposition failed for {context}: {exc}") from exc


def _particle_hole(v: np.ndarray) -> np.ndarray:
    L = v.shape[0] // 2
    return np.concatenate([v[L:], v[:L]]).conj()


def _lagrangian_half(Z: np.ndarray) -> np.ndarray:
    """Pick half of a particle-hole symmetric null space, orthogonal to its own conjugate image."""
    # vectors fixed by the particle-hole map form a real structure on Z
    cand = np.hstack([Z + _particle_hole(Z), 1j * (Z - _particle_hole(Z))])
    L = Z.shape[0] // 2
    # fixed vectors look like (u, u*): an orthonormal basis is found in the real embedding of u
    u = cand[:L]
    emb = np.vstack([u.real, u.imag])
    U, s, _ = np.linalg.svd(emb, full_matrices=False)
    k = Z.shape[1]
    U = U[:, :k]
    r = U[:L] + 1j * U[L:]
    real_vecs = np.vstack([r, r.conj()]) / np.sqrt(2.0)
    return (real_vecs[:, 0::2] + 1j * real_vecs[:, 1::2]) / np.sqrt(2.0)


def _empty_half(Z: np.ndarray) -> np.ndarray:
    """Half of the null space ``Z`` with the least particle-block weight.

    Filling these vectors leaves the zero modes as empty as the particle-hole
    structure allows. Weights pair up as ``(s, 1 - s)``; a residual block at
    ``s = 1/2`` (Majorana-like modes) is split by :func:`_lagrangian_half`.
    """
    L = Z.shape[0] // 2
    Zp = Z[:L]
    s, W = np.linalg.eigh(Zp.conj().T @ Zp)
    k = Z.shape[1] // 2
    low = s < 0.5 - 1e-8
    mid = np.abs(s - 0.5) <= 1e-8
    picked = Z @ W[:, low]
    if mid.any():
        picked = np.hstack([picked, _lagrangian_half(Z @ W[:, mid])])
    if picked.shape[1] != k:
        raise NumericalFailure(f"could not split a {2 * k}-dimensional zero-mode space")
    return picked


class GroundState:
    """Gaussian ground state of the unperturbed chain.

    Attributes:
        energies: quasiparticle energies ``E_k >= 0`` in ascending order.
        occupied: ``2L x L`` orthonormal basis ``Q`` of the filled (negative
            energy) single-particle subspace of ``M``.
        rho: correlation matrix ``<Psi_i^dag Psi_j> = conj(Q Q^dag)``, a
            rank-``L`` projector.
    """

    def __init__(self, chain: Chain):
        M = nambu_matrix(chain)
        w, V = eigh(M, context=chain)
        L = chain.n_sites
        self.energies = np.sort(np.abs(w))[::2].copy() if L else np.zeros(0)
        zero = np.abs(w) < ZERO_MODE_TOL
        self.degenerate = bool(zero.any())
        if self.degenerate:
            if chain.zero_modes == "raise":
                raise DegenerateGroundState(
                    f"zero-energy mode |E| = {np.abs(w[zero]).min():.3e} < {ZERO_MODE_TOL} "
                    f"(L={L}, lam={chain.lam}, gamma={chain.gamma})",
                    energies=w[zero],
                )
            occ = np.hstack([V[:, w <= -ZERO_MODE_TOL], _empty_half(V[:, zero])])
        else:
            occ = V[:, w < 0]
        self.occupied = occ
        self.rho = (occ @ occ.conj().T).conj()
        if np.isrealobj(occ):
            self.rho = self.rho.real
        self.energy = -0.5 * float(self.energies.sum())


def ground_correlations(params) -> np.ndarray:
    """Two-point matrix ``rho0`` of the unperturbed environment ground state."""
    return GroundState(_as_chain(params)).rho


def ground_energy(params) -> float:
    """Many-body ground energy ``-1/2 sum_k E_k``; defined even with zero modes."""
    return -0.5 * float(quasiparticle_energies(params).sum())


def quasiparticle_energies(params, perturbed=()) -> np.ndarray:
    chain = _as_chain(params)
    w = np.linalg.eigvalsh(nambu_matrix(chain, perturbed))
    return np.sort(np.abs(w))[::2]


def propagator(H: np.ndarray, t: float) -> np.ndarray:
    """``exp(i H t)`` for Hermitian ``H``."""
    w, V = eigh(H, context=f"propagator(t={t})")
    return (V * np.exp(1j * w * t)) @ V.conj().T
