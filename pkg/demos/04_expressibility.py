"""
Second-moment expressibility
============================

The Haar average of ``(V|0><0|V^+)`` on two copies is ``(I + S)/(d(d+1))``
with ``S`` the swap. Comparing it in trace norm with the sampled average over
an ansatz measures how far the ansatz is from a 2-design.
"""

import numpy as np

from pqcfourier import expressibility2, haar_second_moment, hea, hee, zero_state

state = zero_state(2)
print("Haar moment eigenvalues:", np.round(np.linalg.eigvalsh(haar_second_moment(state).matrix), 4))

for L in (1, 2, 5, 20):
    eps = [expressibility2(hea(2, L), state, 5000, seed) for seed in range(3)]
    print(f"hea(2, {L:>2})  eps2 = {np.mean(eps):.4f} +- {np.std(eps):.4f}")

# a complex layout gets much closer to Haar than the real RY/CNOT one
print(f"hea(2, 20, 'XY') eps2 = {expressibility2(hea(2, 20, 'XY'), state, 5000, 0):.4f}")

# the embedding alone, sampled over its single data variable
print(f"hee(2, 20) over x   eps2 = {expressibility2(hee(2, 20), state, 5000, 0):.4f}")
