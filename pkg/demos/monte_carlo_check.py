"""Empirical tail frequencies next to the Bernstein bounds.

Simulates 10^5 stationary paths of length 200 and counts how often the
number of visits to state 0 deviates from its mean by at least t.

Run with ``python demos/monte_carlo_check.py``.
"""

from markovconc import SimConfig, new_kernel, tail_experiment, tv_experiment

P = new_kernel(None, [[0.6, 0.4], [0.4, 0.6]])
cfg = SimConfig(seed=12345, trials=100_000, n=200)
rep = tail_experiment(P, [1.0, 0.0], cfg, range(2, 41, 4), workers=4)

names = list(rep.bound_values)
print("   t   empirical  " + "  ".join(f"{v:>9}" for v in names))
for i, t in enumerate(rep.t_grid):
    row = "  ".join(f"{rep.bound_values[v][i]:9.3g}" for v in names)
    print(f"{t:4.0f}  {rep.empirical_tail[i]:10.2e}  {row}")
print("violations:", rep.violations)

tv = tv_experiment(P, cfg, workers=4)
print(f"\nmean d_TV(empirical, pi) = {tv.mean_tv:.4f}, bound {tv.mean_bound:.4f}")
