"""Short-time Gaussian rate alpha(lambda) and its derivative for two chain lengths.

Run: python3 demos/criticality_scan.py   (about a minute)
"""
import numpy as np

from spinchannel import ModelParams
from spinchannel.analysis import rate_scan

eps = 0.05
grid = np.round(np.arange(0.5, 1.3001, 0.05), 4)
for n in (4, 8):
    times = np.linspace(0.0, np.sqrt(0.5 / (n * eps**2 / 4)), 41)
    scan = rate_scan(ModelParams(n_qubits=n, epsilon=eps), grid, times)
    print(f"n = {n}: derivative peaks at lambda = {scan.peak_location:.3f} (prominence {scan.prominence:.2e})")
    for lam, r, d in zip(scan.lambda_grid, scan.rates, scan.derivative):
        print(f"   lambda={lam:5.2f}  alpha={r:.6f}  dalpha/dlambda={d:+.5f}")
