"""Discounted income of a vineyard whose weather follows a two-state chain.

Good years (state 1) yield one unit of wine, bad years nothing. With interest
rate r the present value over a horizon of H years is
W = sum_i X_i (1 + r)^-i. The per-coordinate Bernstein bound with
f_i(x) = x (1 + r)^-i controls the chance that W falls far below its mean.
The linear term in t makes the bound loose for small deviations; it only
becomes informative once the price is well below E W.

Run with ``python demos/vineyard.py``.
"""

import numpy as np

from markovconc import SimConfig, bernstein_spec, bernstein_tail, new_kernel, sample_paths, stationary_distribution

P = new_kernel(["freeze", "good"], [[0.3, 0.7], [0.2, 0.8]])
pi = stationary_distribution(P).weights
r, H = 0.01, 1000
disc = (1 + r) ** -np.arange(1, H + 1)
fs = [np.array([0.0, 1.0]) * d for d in disc]

mean = pi[1] * disc.sum()
spec = bernstein_spec(P, None, None, "RevGeneral", fs=fs, C=1.0)
print(f"E W = {mean:.3f} (infinite-horizon limit {pi[1] / r:.3f}), V_S = {spec.V_S:.4f}, gamma* = {spec.gamma_star:.3f}")

paths = sample_paths(P, SimConfig(seed=1, trials=20_000, n=H))
W = paths @ disc
for price in (50.0, 30.0, 20.0, 10.0):
    t = mean - price
    emp = float(np.mean(np.abs(W - mean) >= t))
    print(f"price {price:5.1f}: P(|W - EW| >= {t:.2f}) <= {bernstein_tail(spec, t).value:.3g}   (simulated {emp:.3g})")
