"""Exact variance of an additive functional against the spectral bounds,
then Bernstein tails for the same sum.

Run with ``python demos/variance_and_bernstein.py``.
"""

import numpy as np

from markovconc import bernstein_spec, bernstein_tail, new_kernel, variance_report

P = new_kernel(None, [[0.9, 0.1, 0.0], [0.05, 0.9, 0.05], [0.0, 0.1, 0.9]])
f = np.array([0.0, 1.0, 3.0])

for n in (10, 100, 1000):
    r = variance_report(P, None, f, n)
    print(f"n={n:5d}  exact={r.exact:10.3f}  2nV/gamma={r.bound_rev:10.3f}  4nV/gamma_ps={r.bound_nonrev:10.3f}")

n = 1000
print("\nBernstein tails for |S - E S| >= t, n =", n)
specs = {v: bernstein_spec(P, f, n, v) for v in ("RevSigma", "Rev", "NonRev")}
print("    t  " + "  ".join(f"{v:>9}" for v in specs))
for t in (300, 400, 600, 800):
    print(f"{t:5d}  " + "  ".join(f"{bernstein_tail(s, t).value:9.3g}" for s in specs.values()))
