"""Is a tossed coin an i.i.d. sequence or a sticky Markov chain?

Uses the bundled record of real coin tosses. H0 is a fair i.i.d. coin, H1 a
two-state chain that repeats the previous side with probability 0.6.

Run with ``python demos/coin_tossing.py`` (or ``markovconc coin-demo``).
"""

from markovconc import coin_test, coin_tosses, decide

test = coin_test(xi=0.0)
print(f"delta = {test.delta:.4f}   J0 = {test.J0:.4e}   J1 = {test.J1:.4e}")
print(f"V0 = {test.V0:.4e}   V1 = {test.V1:.4e}")
print(f"gamma_ps(Q0) = {test.gamma_ps_Q0:.4f}   gamma_ps(Q1) = {test.gamma_ps_Q1:.4f}")

data = coin_tosses()
rep = decide(test, data)
print(f"\n{len(data)} tosses, statistic T/(n-1) = {rep.statistic:.4e}, decision: {rep.decision}")
print(f"type-I error  <= exp(-{rep.type1_exponent:.3f}) = {rep.type1_bound:.4f}")
print(f"type-II error <= exp(-{rep.type2_exponent:.3f}) = {rep.type2_bound:.4f}")
