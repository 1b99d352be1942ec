"""Total variation profiles and the gap/mixing-time bridges.

Run with ``python demos/mixing_times.py``.
"""

import numpy as np

from markovconc import (
    absolute_spectral_gap,
    gap_lower_bounds_from_mixing,
    mixing_profile,
    mixing_upper_bounds_from_gap,
    new_kernel,
    stationary_distribution,
)

# lazy random walk on a 5-cycle
m = 5
M = 0.5 * np.eye(m) + 0.25 * (np.roll(np.eye(m), 1, axis=1) + np.roll(np.eye(m), -1, axis=1))
P = new_kernel(None, M)
pi = stationary_distribution(P)

rep = mixing_profile(P, pi, eps=(1 / 4, 1 / 8, 1 / 16))
print(" t        d(t)     dbar(t)")
for (t, d), (_, db) in zip(rep.d_table[:10], rep.dbar_table[:10]):
    print(f"{t:2d}  {d:10.6f}  {db:10.6f}")
print("t_mix(eps):", rep.t_mix_eps)
print("tau(eps):  ", rep.tau_eps)
print("tau_min:   ", round(rep.tau_min, 4))

g_star = absolute_spectral_gap(P, pi)
lb = gap_lower_bounds_from_mixing(rep, reversible=True)
print(f"gamma* = {g_star:.4f}, lower bound from mixing = {lb.gamma_star_lb:.4f}")
print(f"t_mix = {rep.t_mix()}, upper bound from gamma* = {mixing_upper_bounds_from_gap(g_star, pi.pi_min):.2f}")
