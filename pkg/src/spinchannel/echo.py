"""Generalized Loschmidt echoes through the free-fermion determinant.

For carriers in basis states ``x`` and ``y`` the echo is

    L_xy(t) = <phi| exp(i H_x t) exp(-i H_y t) |phi>,

with ``H_x`` the chain Hamiltonian shifted by ``-eps sigma^z`` on the sites
coupled to excited qubits. In the Nambu picture the determinant

    D(t) = det(1 - rho0 + rho0 exp(i M_x t) exp(-i M_y t)) = det(Q^dag W(t) Q)

equals ``L_xy(t)**2`` (``Q`` spans the filled modes). The echo is recovered as
``sqrt(D)`` on the branch continuously connected to ``L(0) = 1``: the phase of
``D`` is unwrapped along a path ``0 -> t`` that is bisected wherever consecutive
samples differ by more than a safe phase or log-magnitude step.
"""
from __future__ import annotations

import functools
import threading
from collections import OrderedDict

import numpy as np

from .errors import NumericalFailure, SizeLimitExceeded
from .freefermion import GroundState, eigh, nambu_matrix
from .model import Chain, ModelParams, as_basis_string
from .parallel import chunk_slices, code_array, run_chunks

EXACT_MAX_QUBITS = 12

# a path segment is accepted once |eps| k dt <= |L| / sqrt(2) at one of its ends
SAFE_FRACTION = 1.0 / np.sqrt(2.0)
MAX_DEPTH = 60
# memory budget for cached per-string eigendecompositions, per engine
MODE_CACHE_BYTES = 256 * 2**20


def _popcount(v) -> int:
    return bin(int(v)).count("1")


def _subcode(code: int, n: int, owned) -> int:
    out = 0
    for j in owned:
        out = (out << 1) | ((int(code) >> (n - 1 - j)) & 1)
    return out


class EchoEngine:
    """Echo evaluator for one fixed chain, caching per-string eigendecompositions.

    The cache is keyed by the integer basis-string code; each entry holds the
    spectrum of the conditional Nambu matrix and its filled-mode overlaps, from
    which ``exp(i M_x t)`` restricted to the filled subspace follows for any ``t``.

    Args:
        model: :class:`ModelParams` or a :class:`Chain`.
        factorize: evaluate independent chain blocks separately and multiply.
    """

    def __init__(self, model, factorize: bool = True):
        chain = model.chain() if isinstance(model, ModelParams) else model
        self.chain = chain
        self.n = chain.n_qubits
        self._parts = None
        if factorize and len(chain.blocks()) > 1:
            self._parts = [(EchoEngine(sub, factorize=False), owned) for sub, owned in chain.split()]
            return
        self.ground = GroundState(chain)
        self._Q = self.ground.occupied
        self._modes = OrderedDict()
        self._lock = threading.Lock()
        L = max(chain.n_sites, 1)
        entry_bytes = 8 * (2 * L + 4 * L * L + 2 * L * L * (1 if np.isrealobj(self._Q) else 2))
        self._cache_limit = max(64, MODE_CACHE_BYTES // entry_bytes)

    @property
    def n_sites(self) -> int:
        return self.chain.n_sites

    # single-particle kernels

    def _mode(self, code: int):
        with self._lock:
            entry = self._modes.get(code)
            if entry is not None:
                self._modes.move_to_end(code)
                return entry
        M = nambu_matrix(self.chain, self.chain.sites_for_code(code))
        w, V = eigh(M, context=f"lam={self.chain.lam}, gamma={self.chain.gamma}, code={code}")
        entry = (w, V.T.copy(), self._Q.conj().T @ V)
        with self._lock:
            self._modes[code] = entry
            while len(self._modes) > self._cache_limit:
                self._modes.popitem(last=False)
        return entry

    def filled_propagator(self, code: int, t: float) -> np.ndarray:
        """``Q^dag exp(i M_x t)`` (``L x 2L``) for the basis string with integer ``code``."""
        w, Vt, a = self._mode(int(code))
        ph = np.exp(1j * w * t)
        return (a * ph) @ Vt

    def _propagated(self, codes, t: float):
        """Stacked ``Q^dag exp(i M t)`` for the distinct ``codes``, plus the inverse index."""
        uniq, inv = np.unique(codes, return_inverse=True)
        modes = [self._mode(int(c)) for c in uniq]
        w = np.stack([m[0] for m in modes])
        Vt = np.stack([m[1] for m in modes])
        a = np.stack([m[2] for m in modes])
        c, s = np.cos(w * t)[:, None, :], np.sin(w * t)[:, None, :]
        if np.isrealobj(a):
            A = np.matmul(a * c, Vt) + 1j * np.matmul(a * s, Vt)
        else:
            A = np.matmul(a * (c + 1j * s), Vt)
        return A, inv

    def _logdet(self, xs, ys, t: float):
        """Phase angle and log-modulus of ``D = L**2`` for code pairs at time ``t``."""
        P = len(xs)
        A, inv = self._propagated(np.concatenate([xs, ys]), t)
        G = np.matmul(A[inv[:P]], A[inv[P:]].conj().swapaxes(-1, -2))
        try:
            sign, logabs = np.linalg.slogdet(G)
        except np.linalg.LinAlgError as exc:
            raise NumericalFailure(
                f"determinant failed at lam={self.chain.lam}, gamma={self.chain.gamma}, t={t}: {exc}"
            ) from exc
        return np.angle(sign), logabs

    # phase tracking
    #
    # |dL/dt| <= ||H_x - H_y|| = |eps| k (k differing qubits), so over a segment
    # with |eps| k dt <= |L_end| / sqrt(2) the echo stays in a cone of half-angle
    # pi/4 around L_end: arg L moves by less than pi/4, arg D by less than pi/2,
    # and the wrapped increment of arg D is exact. Other segments are bisected.

    def _path_delta(self, xs, ys, speed, ta, tb, ang_a, log_a, ang_b, log_b, depth):
        delta = np.angle(np.exp(1j * (ang_b - ang_a)))
        reach = np.exp(0.5 * np.maximum(log_a, log_b)) * SAFE_FRACTION
        bad = speed * abs(tb - ta) > reach
        if depth >= MAX_DEPTH or not bad.any():
            return delta
        idx = np.nonzero(bad)[0]
        tm = 0.5 * (ta + tb)
        xi, yi, vi = xs[idx], ys[idx], speed[idx]
        ang_m, log_m = self._logdet(xi, yi, tm)
        d1 = self._path_delta(xi, yi, vi, ta, tm, ang_a[idx], log_a[idx], ang_m, log_m, depth + 1)
        d2 = self._path_delta(xi, yi, vi, tm, tb, ang_m, log_m, ang_b[idx], log_b[idx], depth + 1)
        delta[idx] = d1 + d2
        return delta

    def _speed(self, xs, ys) -> np.ndarray:
        k = np.array([_popcount(int(x) ^ int(y)) for x, y in zip(xs, ys)], dtype=float)
        return abs(self.chain.epsilon) * k

    def _track(self, xs, ys, taus, direction, base=None):
        """Echoes at ``direction * taus`` (``taus`` sorted, nonnegative) for distinct pairs.

        ``base(t)`` may supply the path samples at the requested times in bulk;
        bisection points always go through :meth:`_logdet`.
        """
        if base is None:
            base = lambda t: self._logdet(xs, ys, t)  # noqa: E731
        P = len(xs)
        out = np.empty((len(taus), P), dtype=complex)
        speed = self._speed(xs, ys)
        theta = np.zeros(P)
        ang_prev, log_prev = np.zeros(P), np.zeros(P)
        t_prev = 0.0
        for i, tau in enumerate(taus):
            if tau > t_prev:
                ang, lg = base(direction * tau)
                theta += self._path_delta(
                    xs, ys, speed, direction * t_prev, direction * tau, ang_prev, log_prev, ang, lg, 0
                )
                ang_prev, log_prev, t_prev = ang, lg, tau
            out[i] = np.exp(0.5 * log_prev + 0.5j * theta)
        return out

    def _series_block(self, xs, ys, times):
        xs, ys = np.asarray(xs), np.asarray(ys)
        out = np.ones((len(times), len(xs)), dtype=complex)
        diff = np.nonzero(xs != ys)[0]
        if len(diff) == 0:
            return out
        xd, yd = xs[diff], ys[diff]
        for direction in (1.0, -1.0):
            sel = np.nonzero(times * direction > 0)[0]
            if len(sel) == 0:
                continue
            taus = np.abs(times[sel])
            order = np.argsort(taus, kind="stable")
            vals = self._track(xd, yd, taus[order], direction)
            rows = sel[order]
            out[np.ix_(rows, diff)] = vals
        return out

    # exhaustive pair sums

    def reflection_symmetric(self) -> bool:
        """Whether mirroring the chain maps qubit ``j`` to ``n + 1 - j`` and fixes the ground state."""
        c = self.chain
        L = c.n_sites
        return (
            self._parts is None
            and not self.ground.degenerate
            and all(a + b == L - 1 for a, b in zip(c.qubit_sites, reversed(c.qubit_sites)))
            and tuple(reversed(c.active_bonds)) == tuple(c.active_bonds)
        )

    def _row_blocks(self):
        N = 2**self.n
        L = max(self.n_sites, 1)
        rows = int(max(1, min(N, 4e6 // (N * L * L))))
        return [(x0, min(x0 + rows, N)) for x0 in range(0, N, rows)]

    def _row_block_sums(self, x0, x1, times, weights_fn):
        N = 2**self.n
        L = self.n_sites
        X = np.arange(x0, x1, dtype=np.int64)
        Y = np.arange(x0 + 1, N, dtype=np.int64)
        T = len(times)
        if len(Y) == 0:
            return np.zeros(T), np.zeros(T)
        xx, yy = np.meshgrid(X, Y, indexing="ij")
        w = weights_fn(xx, yy)
        keep = (yy > xx) & (w > 0)
        xs, ys, w = xx[keep], yy[keep], w[keep].astype(float)
        if len(xs) == 0:
            return np.zeros(T), np.zeros(T)

        def base(t):
            A, inv = self._propagated(np.concatenate([X, Y]), t)
            AX = A[inv[: len(X)]].reshape(len(X) * L, 2 * L)
            AY = A[inv[len(X):]].reshape(len(Y) * L, 2 * L)
            C = (AX @ AY.conj().T).reshape(len(X), L, len(Y), L)
            G = C.transpose(0, 2, 1, 3)[keep]
            sign, logabs = np.linalg.slogdet(G)
            return np.angle(sign), logabs

        out = np.ones((T, len(xs)), dtype=complex)
        for direction in (1.0, -1.0):
            sel = np.nonzero(times * direction > 0)[0]
            if len(sel) == 0:
                continue
            taus = np.abs(times[sel])
            order = np.argsort(taus, kind="stable")
            out[sel[order]] = self._track(xs, ys, taus[order], direction, base=base)
        re = out.real @ w
        sq = (out.real**2 + out.imag**2) @ w
        return re, sq

    def pair_sums(self, times, threads: int = 1):
        """Sums of ``Re L_xy`` and ``|L_xy|^2`` over all pairs ``x < y`` of this block."""
        if self._parts is not None:
            raise ValueError("pair sums are defined per unbroken block")
        times = np.atleast_1d(np.asarray(times, dtype=float))
        n = self.n
        if self.reflection_symmetric():
            rev = np.array([int(format(c, f"0{n}b")[::-1], 2) for c in range(2**n)], dtype=np.int64)
            N = 2**n

            def weights_fn(xx, yy):
                rx, ry = rev[xx], rev[yy]
                key = xx * N + yy
                img = np.minimum(rx, ry) * N + np.maximum(rx, ry)
                return np.where(key < img, 2, np.where(key == img, 1, 0))
        else:
            def weights_fn(xx, yy):
                return np.ones_like(xx)

        parts = run_chunks(
            lambda blk: self._row_block_sums(blk[0], blk[1], times, weights_fn), self._row_blocks(), threads
        )
        re_sum = np.zeros(len(times))
        sq_sum = np.zeros(len(times))
        for a, b in parts:
            re_sum += a
            sq_sum += b
        return re_sum, sq_sum

    def chunk_size(self) -> int:
        L = max(self.n_sites, 1) if self._parts is None else max(e.n_sites for e, _ in self._parts)
        return int(np.clip(5e7 / (64.0 * L * L), 64, 8192))

    def series(self, xs, ys, times, threads: int = 1) -> np.ndarray:
        """Echo values ``(len(times), len(xs))`` for integer-code pairs ``(xs[k], ys[k])``."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        xs = code_array(xs, self.n)
        ys = code_array(ys, self.n)
        if self._parts is not None:
            out = np.ones((len(times), len(xs)), dtype=complex)
            for engine, owned in self._parts:
                sx = code_array([_subcode(c, self.n, owned) for c in xs], len(owned))
                sy = code_array([_subcode(c, self.n, owned) for c in ys], len(owned))
                out *= engine.series(sx, sy, times, threads=threads)
            return out
        chunks = chunk_slices(len(xs), self.chunk_size())
        parts = run_chunks(lambda sl: self._series_block(xs[sl], ys[sl], times), chunks, threads)
        if not parts:
            return np.ones((len(times), 0), dtype=complex)
        return np.concatenate(parts, axis=1)

    def echo(self, x, y, t: float) -> complex:
        cx = as_basis_string(x, self.n).code
        cy = as_basis_string(y, self.n).code
        return complex(self.series([cx], [cy], [t])[0, 0])


@functools.lru_cache(maxsize=4)
def engine_for(params: ModelParams, factorize: bool = True) -> EchoEngine:
    return EchoEngine(params, factorize=factorize)


def loschmidt_echo(params: ModelParams, x, y, t: float) -> complex:
    """Echo ``L_xy(t)``; ``x``, ``y`` are ``{g,e}`` strings, bit tuples or integer codes."""
    return engine_for(params).echo(x, y, t)


def echo_series(params: ModelParams, x, y, times) -> np.ndarray:
    """``L_xy`` along a time grid for one pair of basis strings."""
    n = params.n_qubits
    cx, cy = as_basis_string(x, n).code, as_basis_string(y, n).code
    return engine_for(params).series([cx], [cy], times)[:, 0]


def _check_exact(params: ModelParams):
    if params.n_qubits > EXACT_MAX_QUBITS:
        raise SizeLimitExceeded(
            f"exact 2^n x 2^n path limited to n <= {EXACT_MAX_QUBITS}, got n={params.n_qubits}"
        )


def upper_pairs(n: int) -> tuple:
    """All code pairs ``x < y`` on ``n`` bits."""
    N = 2**n
    xs, ys = np.triu_indices(N, k=1)
    return xs.astype(np.int64), ys.astype(np.int64)


def echo_matrix(params: ModelParams, t: float, threads: int = 1) -> np.ndarray:
    """Full ``N x N`` matrix ``M[x, y] = L_xy(t)``, ``N = 2**n``, with codes as indices."""
    _check_exact(params)
    N = params.n_states
    xs, ys = upper_pairs(params.n_qubits)
    vals = engine_for(params).series(xs, ys, [t], threads=threads)[0]
    M = np.eye(N, dtype=complex)
    M[xs, ys] = vals
    M[ys, xs] = vals.conj()
    return M
