"""Average fidelity and purity versus time on both sides of the critical field.

Run: python3 demos/fidelity_across_phases.py
"""
import numpy as np

from spinchannel import ModelParams
from spinchannel.channel import exact_series

times = np.linspace(0.0, 40.0, 9)
print("n = 10, eps = 0.05, exact averages over all 4^n pairs")
print("   Jt " + "".join(f"{'F lam=' + str(l):>14}" for l in (0.5, 1.0, 2.0)))
series = {lam: exact_series(ModelParams(n_qubits=10, lam=lam, epsilon=0.05), times) for lam in (0.5, 1.0, 2.0)}
for i, t in enumerate(times):
    print(f"{t:5.1f} " + "".join(f"{series[lam][0][i]:14.6f}" for lam in series))
print("\nlate-time purity (Jt = 40):", {lam: round(float(s[1][-1]), 6) for lam, s in series.items()})
