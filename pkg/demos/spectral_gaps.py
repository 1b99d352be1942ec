"""Spectral gap, absolute spectral gap and pseudo spectral gap of small chains.

Run with ``python demos/spectral_gaps.py``.
"""

import numpy as np

from markovconc import absolute_spectral_gap, new_kernel, pair_chain, pseudo_spectral_gap, spectral_gap

# A sticky two-state chain is reversible: its spectrum is {1, 0.2}.
P = new_kernel(["bad", "good"], [[0.6, 0.4], [0.4, 0.6]])
print("sticky chain   gamma =", spectral_gap(P), " gamma* =", absolute_spectral_gap(P))

# The flip chain never mixes. Its gap is 2 while the absolute gap is 0.
flip = new_kernel(["0", "1"], [[0, 1], [1, 0]])
print("flip chain     gamma =", round(spectral_gap(flip), 12), " gamma* =", round(absolute_spectral_gap(flip), 12))

# Lifting the sticky chain to consecutive pairs gives a non-reversible kernel.
# (P*)P has a repeated eigenvalue 1, so the pseudo gap needs k = 2.
Q, mu = pair_chain(P)
ps = pseudo_spectral_gap(Q, mu)
print("pair chain     gamma_ps =", round(ps.gamma_ps, 12), " attained at k =", ps.k_ps)
for k, eigs in ps.eigenvalues_by_k.items():
    print(f"  spectrum of (Q*)^{k} Q^{k}:", np.round(eigs, 6))
