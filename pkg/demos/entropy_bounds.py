"""Channel entropy against its Renyi-2 lower bound and the quantum Fano upper bound.

Run: python3 demos/entropy_bounds.py
"""
from spinchannel import ModelParams
from spinchannel.channel import (
    channel_entropy,
    exact_series,
    fano_upper_bound,
    hashing_bound,
    renyi_lower_bound,
)
from spinchannel.oracle import ed_environment_entropy

p = ModelParams(n_qubits=4, lam=1.0, epsilon=0.5)
print(f"{'Jt':>5} {'Renyi-2':>10} {'H(J)':>10} {'H(env)':>10} {'Fano':>10} {'hashing':>10}")
for t in (0.5, 2.0, 5.0, 10.0):
    F, P2 = (v[0] for v in exact_series(p, [t]))
    H = channel_entropy(p, t)
    print(f"{t:5.1f} {renyi_lower_bound(P2):10.5f} {H:10.5f} {ed_environment_entropy(p, t):10.5f} "
          f"{fano_upper_bound(F, 4):10.5f} {hashing_bound(p, t):10.5f}")
