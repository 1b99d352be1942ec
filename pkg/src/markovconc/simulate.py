"""Seeded Monte Carlo checks of the bound evaluators.

Randomness comes from numpy's Philox counter-based generator. The key is
derived from the user seed, and trial ``i`` uses the counter block whose top
64-bit word equals ``i``, so every trial has its own stream. The result of
a trial depends only on ``(seed, i)``, never on how trials are batched or
spread across workers.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .bounds import bernstein_spec, bernstein_tail, dtv_concentration_tail, empirical_tv_mean_bound
from .errors import NoFiniteTau, ValidationError
from .kernel import Distribution, as_matrix, as_weights, is_reversible, stationary_distribution
from .mixing import mixing_profile
from .spectral import pseudo_spectral_gap, spectral_gap

CHUNK = 4096


@dataclass(frozen=True)
class SimConfig:
    seed: int
    trials: int
    n: int
    init: object = "stationary"

    def __post_init__(self):
        if self.trials < 1 or self.n < 1:
            raise ValidationError("trials and n must be >= 1")


def trial_generator(seed: int, trial: int) -> np.random.Generator:
    key = np.random.SeedSequence(seed).generate_state(2, np.uint64)
    return np.random.Generator(np.random.Philox(key=key, counter=[0, 0, 0, trial]))


def _init_weights(init, pi_fn, n_states):
    if isinstance(init, str):
        if init != "stationary":
            raise ValidationError(f"unknown init {init!r}")
        return as_weights(pi_fn())
    if isinstance(init, (int, np.integer)):
        w = np.zeros(n_states)
        w[int(init)] = 1.0
        return w
    w = as_weights(init)
    if w.shape != (n_states,):
        raise ValidationError("initial distribution has the wrong length")
    return w


def _inverse_cdf(cum, u):
    # first index with u < cum; clip guards rows whose cumsum ends at 1 - ulp
    idx = (u[:, None] >= cum).sum(axis=1)
    return np.minimum(idx, cum.shape[-1] - 1)


def _run_block(M_cum, init_cum, key, trials, n):
    U = np.empty((len(trials), n))
    for r, i in enumerate(trials):
        g = np.random.Generator(np.random.Philox(key=key, counter=[0, 0, 0, int(i)]))
        U[r] = g.random(n)
    paths = np.empty((len(trials), n), dtype=np.int64)
    paths[:, 0] = _inverse_cdf(np.broadcast_to(init_cum, (len(trials), init_cum.size)), U[:, 0])
    for t in range(1, n):
        cum = M_cum[paths[:, t - 1]]
        u = U[:, t]
        idx = (u[:, None] >= cum).sum(axis=1)
        paths[:, t] = np.minimum(idx, M_cum.shape[1] - 1)
    return paths


def sample_paths(P, config: SimConfig, pi=None, workers: int = 1) -> np.ndarray:
    """``(trials, n)`` array of state indices, one independent path per row."""
    M = as_matrix(P)
    init = _init_weights(config.init, lambda: stationary_distribution(P) if pi is None else pi, M.shape[0])
    M_cum = np.cumsum(M, axis=1)
    init_cum = np.cumsum(init)
    key = np.random.SeedSequence(config.seed).generate_state(2, np.uint64)
    chunks = [np.arange(a, min(a + CHUNK, config.trials)) for a in range(0, config.trials, CHUNK)]
    run = lambda ch: _run_block(M_cum, init_cum, key, ch, config.n)
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(workers) as ex:
            parts = list(ex.map(run, chunks))
    else:
        parts = [run(ch) for ch in chunks]
    return np.vstack(parts)


def sample_path(P, init="stationary", n: int = 1, seed: int = 0, trial: int = 0, pi=None) -> np.ndarray:
    """One path of length ``n`` (trial ``trial`` of the stream keyed by ``seed``)."""
    M = as_matrix(P)
    w = _init_weights(init, lambda: stationary_distribution(P) if pi is None else pi, M.shape[0])
    key = np.random.SeedSequence(seed).generate_state(2, np.uint64)
    return _run_block(np.cumsum(M, axis=1), np.cumsum(w), key, [trial], n)[0]


def empirical_distribution(path, n_states: int) -> np.ndarray:
    path = np.asarray(path)
    if path.size == 0:
        raise ValidationError("empty path")
    return np.bincount(path, minlength=n_states) / path.size


def empirical_tv(path, pi) -> float:
    """``d_TV(pi_em, pi)`` for one path of state indices."""
    w = as_weights(pi)
    return float(0.5 * np.abs(empirical_distribution(path, w.size) - w).sum())


def _empirical_tvs(paths, w):
    m = w.size
    counts = np.zeros((paths.shape[0], m))
    for x in range(m):
        counts[:, x] = (paths == x).sum(axis=1)
    return 0.5 * np.abs(counts / paths.shape[1] - w).sum(axis=1)


def _tail_freq(dev, t_grid, trials):
    emp = np.array([(dev >= t - 1e-9).mean() for t in t_grid])
    se = np.sqrt(emp * (1 - emp) / trials)
    return emp, se


@dataclass
class TailExperimentReport:
    t_grid: list
    empirical_tail: list
    std_error: list
    bound_values: dict
    violations: list = field(default_factory=list)
    trials: int = 0
    n: int = 0
    seed: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)

    def to_csv(self) -> str:
        buf = io.StringIO()
        names = list(self.bound_values)
        w = csv.writer(buf)
        w.writerow(["t", "empirical", "std_error", *names])
        for i, t in enumerate(self.t_grid):
            w.writerow([t, self.empirical_tail[i], self.std_error[i], *(self.bound_values[k][i] for k in names)])
        return buf.getvalue()


def _check(t_grid, emp, se, bounds, sigmas=3.0):
    viol = []
    for name, vals in bounds.items():
        for i, t in enumerate(t_grid):
            if emp[i] > vals[i] + sigmas * se[i]:
                viol.append({"evaluator": name, "t": float(t), "empirical": float(emp[i]), "bound": float(vals[i])})
    return viol


def default_evaluators(P, f, n: int, pi=None, C: float | None = None) -> dict:
    """Bernstein tails applicable to ``P``: RevSigma, Rev and NonRev if reversible, NonRev otherwise."""
    w = as_weights(stationary_distribution(P) if pi is None else pi)
    names = ["RevSigma", "Rev", "NonRev"] if is_reversible(P, w) else ["NonRev"]
    specs = {v: bernstein_spec(P, f, n, v, pi=w, C=C) for v in names}
    return {v: (lambda t, s=s: bernstein_tail(s, t).value) for v, s in specs.items()}


def tail_experiment(
    P,
    f,
    config: SimConfig,
    t_grid,
    evaluators: Mapping[str, Callable[[float], float]] | None = None,
    pi=None,
    workers: int = 1,
) -> TailExperimentReport:
    """Empirical ``P(|S - E_pi S| >= t)`` next to each evaluator's bound.

    A violation is an empirical frequency above the bound by more than three
    binomial standard errors.
    """
    w = as_weights(stationary_distribution(P) if pi is None else pi)
    f = np.asarray(f, dtype=float)
    if evaluators is None:
        evaluators = default_evaluators(P, f, config.n, pi=w)
    paths = sample_paths(P, config, pi=w, workers=workers)
    S = f[paths].sum(axis=1)
    dev = np.abs(S - config.n * float(w @ f))
    t_grid = [float(t) for t in t_grid]
    emp, se = _tail_freq(dev, t_grid, config.trials)
    bounds = {k: [float(fn(t)) for t in t_grid] for k, fn in evaluators.items()}
    return TailExperimentReport(
        t_grid, emp.tolist(), se.tolist(), bounds, _check(t_grid, emp, se, bounds), config.trials, config.n, config.seed
    )


@dataclass
class TVExperimentReport:
    mean_tv: float
    mean_bound: float
    t_mix: int
    gap: float
    gap_variant: str
    t_grid: list
    empirical_tail: list
    std_error: list
    concentration_bound: list
    violations: list = field(default_factory=list)
    trials: int = 0
    n: int = 0

    @property
    def mean_ok(self) -> bool:
        return self.mean_tv <= self.mean_bound

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["mean_ok"] = self.mean_ok
        return d


def tv_experiment(P, config: SimConfig, t_grid=None, pi=None, workers: int = 1) -> TVExperimentReport:
    """Mean and concentration of ``d_TV(pi_em, pi)`` across trials.

    The mean is compared with the spectral bound (gap ``gamma`` for reversible
    chains, ``gamma_ps`` otherwise), the spread around the empirical mean
    with ``2 exp(-t^2 n / (8 t_mix))``.
    """
    w = as_weights(stationary_distribution(P) if pi is None else pi)
    prof = mixing_profile(P, w, eps=(0.25,))
    t_mix = prof.t_mix(0.25)
    if t_mix is None:
        raise NoFiniteTau("t_mix is not finite within the scanned horizon")
    if is_reversible(P, w):
        gap, variant = spectral_gap(P, w), "reversible"
    else:
        gap, variant = pseudo_spectral_gap(P, w).gamma_ps, "nonreversible"
    paths = sample_paths(P, config, pi=w, workers=workers)
    d = _empirical_tvs(paths, w)
    mean = float(d.mean())
    if t_grid is None:
        t_grid = np.linspace(0.0, 0.5, 11)[1:]
    t_grid = [float(t) for t in t_grid]
    emp, se = _tail_freq(np.abs(d - mean), t_grid, config.trials)
    conc = [dtv_concentration_tail(config.n, t_mix, t).value for t in t_grid]
    viol = _check(t_grid, emp, se, {"dtv_concentration": conc})
    return TVExperimentReport(
        mean,
        empirical_tv_mean_bound(w, config.n, gap, variant),
        t_mix,
        gap,
        variant,
        t_grid,
        emp.tolist(),
        se.tolist(),
        conc,
        viol,
        config.trials,
        config.n,
    )
