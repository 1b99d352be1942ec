"""Mixing matrices of Marton couplings and McDiarmid bounds for a Markov chain.

A function of n = 1000 steps with bounded differences c_i = 1/n, e.g. the
empirical frequency of a state. Blocks of length t_mix turn the chain into a
sequence whose coupling matrix has rows 1, 1, eps, eps, eps^2, ...

Run with ``python demos/marton_mcdiarmid.py``.
"""

import numpy as np

from markovconc import block_partition, markov_mixing_matrix, mcdiarmid_general_tail, mcdiarmid_markov_tail, mixing_profile, new_kernel
from markovconc.marton import block_weights, operator_norm

P = new_kernel(None, [[0.8, 0.2], [0.3, 0.7]])
rep = mixing_profile(P, eps=(1 / 4,))
t_mix = rep.t_mix(0.25)
n = 1000
c = np.full(n, 1.0 / n)

part = block_partition(n, t_mix)
G = markov_mixing_matrix(len(part), 0.25)
Cc = block_weights(c, part)
print(f"t_mix = {t_mix}, blocks = {len(part)}, ||Gamma|| = {operator_norm(G):.4f} (at most 2/(1-eps) = 2.667)")
for t in (0.1, 0.15, 0.2):
    general = mcdiarmid_general_tail(G, Cc, t).value
    corollary = mcdiarmid_markov_tail(c, rep.tau_min, t).value
    print(f"t={t:5.2f}  Marton matrix bound {general:.3e}   tau_min bound {corollary:.3e}")
