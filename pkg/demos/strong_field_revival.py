"""Deep in the polarized phase the fidelity follows cos(eps t / 2)^(2n) and revives at 2 pi / eps.

Run: python3 demos/strong_field_revival.py
"""
import numpy as np

from spinchannel import ModelParams
from spinchannel.analysis import closed_form_large_lambda_fidelity, revival_period
from spinchannel.channel import exact_series

eps, n = 0.05, 6
times = np.arange(0.0, 160.0, 0.5)
F, _ = exact_series(ModelParams(n_qubits=n, lam=1e3, epsilon=eps), times)
closed = closed_form_large_lambda_fidelity(n, eps, times)
print(f"max |F - cos^(2n)| = {np.abs(F - closed).max():.2e}")
rev = revival_period(times, F)
print(f"revival at Jt = {rev.period:.3f} (2 pi / eps = {2 * np.pi / eps:.3f}), height {rev.height:.6f}")

F1, _ = exact_series(ModelParams(n_qubits=n, lam=1.0, epsilon=eps), times)
print(f"at the critical field the same window reaches F = {F1[-1]:.4f} with no full revival")
