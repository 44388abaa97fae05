"""Channel-level quantities built from the echo matrix.

The channel acts as ``|x><y| -> L_xy |x><y|`` on the carriers, so its
Choi state is the maximally correlated matrix ``J[x, y] = L_xy / N``. Averages
over all ordered pairs (exact) or over uniformly drawn pairs (sampled) give the
fidelity ``F = <L_xy>`` and purity ``P2 = <|L_xy|^2>``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .echo import EchoEngine, _check_exact, engine_for, upper_pairs
from .model import ModelParams
from .parallel import draw_pairs

ENTROPY_FLOOR = 1e-12
HAAR_CHUNK = 50_000


@dataclass(frozen=True)
class Estimate:
    """Monte Carlo estimate; ``std_error`` is the sample standard deviation over ``sqrt(n_samples)``."""

    value: float
    std_error: float
    n_samples: int
    seed: int


@dataclass
class SampledSeries:
    """Sampled fidelity and purity along a time grid, from one common set of pairs."""

    times: np.ndarray
    fidelity: np.ndarray
    fidelity_error: np.ndarray
    purity: np.ndarray
    purity_error: np.ndarray
    n_samples: int
    seed: int

    def fidelity_estimate(self, i: int) -> Estimate:
        return Estimate(float(self.fidelity[i]), float(self.fidelity_error[i]), self.n_samples, self.seed)

    def purity_estimate(self, i: int) -> Estimate:
        return Estimate(float(self.purity[i]), float(self.purity_error[i]), self.n_samples, self.seed)


# exact averages


def _block_engines(engine: EchoEngine):
    if engine._parts is None:
        return [(engine, engine.n)]
    return [(e, len(owned)) for e, owned in engine._parts]


def _exact_sums(engine: EchoEngine, n: int, times, threads: int):
    """Sums of ``Re L`` and ``|L|^2`` over pairs ``x < y`` of one unbroken block."""
    return engine.pair_sums(times, threads)


def exact_series(params: ModelParams, times, threads: int = 1):
    """Exact ``(F(t), P2(t))`` over all ``4**n`` ordered pairs.

    Independent chain blocks contribute multiplicatively, so a broken chain
    costs only the sum of its block enumerations.
    """
    _check_exact(params)
    times = np.atleast_1d(np.asarray(times, dtype=float))
    F = np.ones(len(times))
    P = np.ones(len(times))
    for engine, nb in _block_engines(engine_for(params)):
        N = 2**nb
        re_sum, sq_sum = _exact_sums(engine, nb, times, threads)
        F *= (N + 2.0 * re_sum) / N**2
        P *= (N + 2.0 * sq_sum) / N**2
    return F, P


def exact_fidelity(params: ModelParams, t: float, threads: int = 1) -> float:
    """``F = (1/N^2) sum_{x,y} L_xy``; real because ``L_yx = conj(L_xy)``."""
    return float(exact_series(params, [t], threads)[0][0])


def exact_purity(params: ModelParams, t: float, threads: int = 1) -> float:
    """``P2 = (1/N^2) sum_{x,y} |L_xy|^2``."""
    return float(exact_series(params, [t], threads)[1][0])


# sampled averages


def sampled_series(params: ModelParams, times, n_samples: int, seed: int, threads: int = 1) -> SampledSeries:
    """Fidelity and purity estimates from ``n_samples`` independent uniform pairs.

    The pairs depend only on ``(n, n_samples, seed)``, so scans over the field
    or time reuse the same pairs (common random numbers).
    """
    if n_samples < 1:
        raise ValueError("n_samples must be at least 1")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    xs, ys = draw_pairs(params.n_qubits, n_samples, seed)
    vals = engine_for(params).series(xs, ys, times, threads=threads)
    re = vals.real
    sq = vals.real**2 + vals.imag**2
    if n_samples > 1:
        scale = 1.0 / np.sqrt(n_samples)
        f_err = re.std(axis=1, ddof=1) * scale
        p_err = sq.std(axis=1, ddof=1) * scale
    else:
        f_err = p_err = np.zeros(len(times))
    return SampledSeries(times, re.mean(axis=1), f_err, sq.mean(axis=1), p_err, int(n_samples), int(seed))


def sampled_fidelity(params: ModelParams, t: float, n_samples: int, seed: int, threads: int = 1) -> Estimate:
    """Estimate of ``F`` as the mean of ``Re L_xy`` over uniform pairs."""
    return sampled_series(params, [t], n_samples, seed, threads).fidelity_estimate(0)


def sampled_purity(params: ModelParams, t: float, n_samples: int, seed: int, threads: int = 1) -> Estimate:
    """Estimate of ``P2`` as the mean of ``|L_xy|^2`` over uniform pairs."""
    return sampled_series(params, [t], n_samples, seed, threads).purity_estimate(0)


# Input averages weight the pair (x, y) by E[|a_x|^2 |a_y|^2]. Two input
# ensembles are supported: "sphere" draws the moduli |a_x| uniformly on the real
# unit sphere, giving (1 + 2 delta_xy) / (N (N + 2)); "haar" draws complex
# Haar-random states, giving (1 + delta_xy) / (N (N + 1)).
MEASURES = ("sphere", "haar")


def _check_measure(measure: str):
    if measure not in MEASURES:
        raise ValueError(f"measure must be one of {MEASURES}, got {measure!r}")


def _input_average(value, N, measure):
    _check_measure(measure)
    if measure == "sphere":
        return N / (N + 2.0) * value + 2.0 / (N + 2.0)
    return (N * value + 1.0) / (N + 1.0)


def average_transmission_fidelity(F: float, N: int, measure: str = "sphere") -> float:
    """Input-averaged fidelity ``sum_xy p_xy L_xy`` expressed through ``F``."""
    return _input_average(F, N, measure)


def average_output_purity(P2: float, N: int, measure: str = "sphere") -> float:
    """Input-averaged output purity expressed through ``P2``."""
    return _input_average(P2, N, measure)


# Choi state and entropies


@dataclass
class ChoiState:
    """Maximally correlated Choi matrix ``J[x, y] = L_xy / N`` (codes as indices)."""

    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def entropy(self) -> float:
        return entropy_bits(self.eigenvalues())

    def purity(self) -> float:
        return float(np.sum(np.abs(self.matrix) ** 2))


def entropy_bits(p) -> float:
    """Shannon/von Neumann entropy in bits, ignoring eigenvalues below the floor."""
    p = np.asarray(p, dtype=float)
    p = p[p > ENTROPY_FLOOR]
    return float(-(p * np.log2(p)).sum())


def _block_echo_matrix(engine: EchoEngine, n: int, t: float) -> np.ndarray:
    xs, ys = upper_pairs(n)
    N = 2**n
    vals = engine.series(xs, ys, [t])[0]
    M = np.eye(N, dtype=complex)
    M[xs, ys] = vals
    M[ys, xs] = vals.conj()
    return M


def choi_state(params: ModelParams, t: float) -> ChoiState:
    from .echo import echo_matrix

    return ChoiState(echo_matrix(params, t) / params.n_states)


def channel_entropy(params: ModelParams, t: float) -> float:
    """Base-2 entropy of the Choi state, summed over independent chain blocks."""
    _check_exact(params)
    total = 0.0
    for engine, nb in _block_engines(engine_for(params)):
        M = _block_echo_matrix(engine, nb, t)
        total += entropy_bits(np.linalg.eigvalsh(M / 2**nb))
    return total


def hashing_bound(params: ModelParams, t: float) -> float:
    """``D1 = log2 N - H(J)``."""
    return params.n_qubits - channel_entropy(params, t)


def capacity_rate_estimate(params: ModelParams, t: float) -> float:
    """Finite-``n`` rate ``1 - H(J)/n``; not regularized, so only an estimate of the capacity bound."""
    return 1.0 - channel_entropy(params, t) / params.n_qubits


def binary_entropy(p: float) -> float:
    p = float(np.clip(p, 0.0, 1.0))
    return entropy_bits([p, 1.0 - p])


def fano_upper_bound(F: float, n: int) -> float:
    """Quantum Fano bound ``H2(F) + (1 - F) log2(4**n - 1)`` on the channel entropy."""
    F = float(np.clip(F, 0.0, 1.0))
    return binary_entropy(F) + (1.0 - F) * np.log2(4.0**n - 1.0)


def loose_fano_bound(F: float, n: int) -> float:
    """Weaker form ``H2(F) + 2 n (1 - F)``."""
    F = float(np.clip(F, 0.0, 1.0))
    return binary_entropy(F) + 2.0 * n * (1.0 - F)


def loose_rate_display(F: float) -> float:
    """Display-only loose rate ``2F - 1`` from combining the weaker Fano form with the hashing rate."""
    return 2.0 * float(F) - 1.0


def renyi_lower_bound(P2: float) -> float:
    """Order-2 Renyi entropy ``-log2 P2``, a lower bound on ``H(J)``."""
    if not P2 > 0:
        raise ValueError(f"purity must be positive, got {P2!r}")
    value = -float(np.log2(P2))
    return value if value > 0.0 else 0.0


# Haar weights


def haar_pair_probability(N: int, equal: bool, measure: str = "sphere") -> float:
    """Average of ``|a_x|^2 |a_y|^2`` over random pure states of dimension ``N``."""
    _check_measure(measure)
    if N < 1:
        raise ValueError("N must be positive")
    if measure == "sphere":
        return (3.0 if equal else 1.0) / (N * (N + 2.0))
    return (2.0 if equal else 1.0) / (N * (N + 1.0))


@dataclass(frozen=True)
class HaarRow:
    pair_class: str
    count: int
    estimate: float
    std_error: float
    exact: float

    @property
    def z_score(self) -> float:
        if self.std_error == 0:
            return 0.0 if abs(self.estimate - self.exact) < 1e-12 else np.inf
        return abs(self.estimate - self.exact) / self.std_error


def _random_weights(gen, k: int, N: int, measure: str) -> np.ndarray:
    if measure == "sphere":
        r = gen.standard_normal((k, N))
        w = r**2
    else:
        z = gen.standard_normal((k, N)) + 1j * gen.standard_normal((k, N))
        w = np.abs(z) ** 2
    return w / w.sum(axis=1, keepdims=True)


def haar_probability_check(N: int, n_states: int = 10**6, seed: int = 0, measure: str = "sphere") -> list:
    """Monte Carlo check of the pair weights.

    ``measure="sphere"`` draws normalized real Gaussian vectors (moduli uniform
    on the unit sphere); ``measure="haar"`` draws normalized complex Gaussian
    vectors. Returns rows for the diagonal class ``x = y``, the off-diagonal
    class and the normalization ``N p_xx + N (N - 1) p_xy``.
    """
    _check_measure(measure)
    if N < 2:
        raise ValueError("N must be at least 2")
    gen = np.random.Generator(np.random.Philox(key=[int(seed) & (2**64 - 1), 2]))
    sums = np.zeros(3)
    sq = np.zeros(3)
    done = 0
    while done < n_states:
        k = min(HAAR_CHUNK, n_states - done)
        w = _random_weights(gen, k, N, measure)
        s4 = (w**2).sum(axis=1)
        diag = s4 / N
        off = (1.0 - s4) / (N * (N - 1))
        tot = N * diag + N * (N - 1) * off
        for i, v in enumerate((diag, off, tot)):
            sums[i] += v.sum()
            sq[i] += (v**2).sum()
        done += k
    classes = (
        ("x=y", N, haar_pair_probability(N, True, measure)),
        ("x!=y", N * (N - 1), haar_pair_probability(N, False, measure)),
        ("normalization", 1, 1.0),
    )
    rows = []
    for i, (name, count, exact) in enumerate(classes):
        mean = sums[i] / n_states
        var = max(sq[i] / n_states - mean**2, 0.0) * n_states / max(n_states - 1, 1)
        rows.append(HaarRow(name, count, float(mean), float(np.sqrt(var / n_states)), exact))
    return rows


def haar_pair_weights(N: int, measure: str = "sphere") -> np.ndarray:
    """``N x N`` matrix of pair weights ``p_xy``."""
    W = np.full((N, N), haar_pair_probability(N, False, measure))
    W[np.diag_indices(N)] = haar_pair_probability(N, True, measure)
    return W


__all__ = [
    "Estimate",
    "SampledSeries",
    "ChoiState",
    "HaarRow",
    "exact_series",
    "exact_fidelity",
    "exact_purity",
    "sampled_series",
    "sampled_fidelity",
    "sampled_purity",
    "average_transmission_fidelity",
    "average_output_purity",
    "choi_state",
    "channel_entropy",
    "entropy_bits",
    "hashing_bound",
    "capacity_rate_estimate",
    "binary_entropy",
    "fano_upper_bound",
    "loose_fano_bound",
    "loose_rate_display",
    "renyi_lower_bound",
    "haar_pair_probability",
    "haar_probability_check",
    "haar_pair_weights",
]
