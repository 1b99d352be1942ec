"""Likelihood ratio test between two Markov chains, with error bounds.

Under ``H0`` the data follow kernel ``P0`` started from its stationary law,
under ``H1`` kernel ``P1``. The test statistic is the normalised
log-likelihood ratio ``T(X) / (n - 1)``; ``H0`` is kept when it exceeds the
threshold ``xi`` and rejected otherwise. Type-I and Type-II errors are
bounded by the non-reversible Bernstein inequality applied to the chain of
consecutive pairs.

The stationarity of the observed data is not checked; the statistic is
computed on any sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ThresholdOutOfRange, TooShort, UnknownState, ZeroTransitionProbability
from .kernel import MarkovKernel, new_kernel, pair_chain, stationary_distribution
from .spectral import pseudo_spectral_gap

STAND_BY = "StandBy"
REJECT = "Reject"


@dataclass
class HypothesisTest:
    P0: MarkovKernel
    P1: MarkovKernel
    pi0: np.ndarray
    pi1: np.ndarray
    Q0: MarkovKernel
    Q1: MarkovKernel
    delta0: float
    delta1: float
    J0: float
    J1: float
    V0: float
    V1: float
    gamma_ps_Q0: float
    gamma_ps_Q1: float
    xi: float = 0.0
    log_ratio: np.ndarray = field(default=None, repr=False)

    @property
    def delta(self) -> float:
        return self.delta0 + self.delta1

    @property
    def states(self):
        return self.P0.states

    def to_dict(self) -> dict:
        return {
            "states": list(self.states),
            "delta0": self.delta0,
            "delta1": self.delta1,
            "delta": self.delta,
            "J0": self.J0,
            "J1": self.J1,
            "V0": self.V0,
            "V1": self.V1,
            "gamma_ps_Q0": self.gamma_ps_Q0,
            "gamma_ps_Q1": self.gamma_ps_Q1,
            "pi0": self.pi0.tolist(),
            "pi1": self.pi1.tolist(),
            "xi": self.xi,
        }


def _log_range(P: MarkovKernel) -> float:
    if np.any(P.matrix <= 0):
        raise ZeroTransitionProbability("both kernels need strictly positive entries (delta would be infinite)")
    L = np.log(P.matrix)
    return float(L.max() - L.min())


def build_test(P0, P1, xi: float = 0.0) -> HypothesisTest:
    """Derive every quantity the test and its error bounds need."""
    if not isinstance(P0, MarkovKernel):
        P0 = new_kernel(None, P0)
    if not isinstance(P1, MarkovKernel):
        P1 = new_kernel(P0.states, P1)
    if P0.states != P1.states:
        raise UnknownState("P0 and P1 must share the same state labels")
    d0 = _log_range(P0)
    d1 = _log_range(P1)
    pi0 = stationary_distribution(P0).weights
    pi1 = stationary_distribution(P1).weights
    Q0, mu0 = pair_chain(P0, pi0)
    Q1, mu1 = pair_chain(P1, pi1)
    h = np.log(P0.matrix / P1.matrix).ravel()
    J0 = float(mu0.weights @ h)
    J1 = float(mu1.weights @ h)
    V0 = float(mu0.weights @ (h - J0) ** 2)
    V1 = float(mu1.weights @ (h - J1) ** 2)
    g0 = pseudo_spectral_gap(Q0, mu0).gamma_ps
    g1 = pseudo_spectral_gap(Q1, mu1).gamma_ps
    return HypothesisTest(P0, P1, pi0, pi1, Q0, Q1, d0, d1, J0, J1, V0, V1, g0, g1, xi, h.reshape(P0.matrix.shape))


def _indices(test: HypothesisTest, observations) -> np.ndarray:
    lookup = {s: i for i, s in enumerate(test.states)}
    try:
        idx = np.array([lookup[str(o)] for o in observations], dtype=int)
    except KeyError as e:
        raise UnknownState(f"observation {e.args[0]!r} is not a state of the test") from None
    if idx.size < 2:
        raise TooShort("need at least two observations")
    return idx


@dataclass(frozen=True)
class Statistic:
    value: float
    pair_only: float
    n: int

    def __float__(self):
        return self.value


def statistic(test: HypothesisTest, observations) -> Statistic:
    """``T(X)/(n-1)`` including the initial-state term, and the pair-sum part."""
    idx = _indices(test, observations)
    n = idx.size
    pair = float(test.log_ratio[idx[:-1], idx[1:]].sum())
    prior = math.log(test.pi0[idx[0]] / test.pi1[idx[0]])
    s = Statistic((prior + pair) / (n - 1), pair / (n - 1), n)
    assert abs(s.value - s.pair_only) <= test.delta / (n - 1) + 1e-12
    return s


@dataclass(frozen=True)
class ErrorBounds:
    type1: float
    type2: float
    exponent1: float
    exponent2: float

    def __iter__(self):
        return iter((self.type1, self.type2))


def error_bounds(test: HypothesisTest, n: int, xi: float | None = None) -> ErrorBounds:
    """One-sided bounds on ``P0(T/(n-1) <= xi)`` and ``P1(T/(n-1) >= xi)``.

    Requires ``J0 - delta/(n-1) >= xi >= J1 + delta/(n-1)``.
    """
    xi = test.xi if xi is None else xi
    if n < 2:
        raise TooShort("n must be at least 2")
    shift = test.delta / (n - 1)
    a = test.J0 - shift - xi
    b = xi - test.J1 - shift
    if a < 0 or b < 0:
        raise ThresholdOutOfRange(
            f"need J0 - delta/(n-1) = {test.J0 - shift:.6g} >= xi = {xi:.6g} >= J1 + delta/(n-1) = {test.J1 + shift:.6g}"
        )
    d = test.delta
    den1 = 8 * test.V0 + 20 * d * a
    den2 = 8 * test.V1 + 20 * d * b
    E1 = a * a * (n - 1) * test.gamma_ps_Q0 / den1 if a > 0 else 0.0
    E2 = b * b * (n - 1) * test.gamma_ps_Q1 / den2 if b > 0 else 0.0
    return ErrorBounds(math.exp(-E1), math.exp(-E2), E1, E2)


@dataclass
class TestReport:
    statistic: float
    pair_statistic: float
    n: int
    xi: float
    decision: str
    type1_bound: float | None = None
    type2_bound: float | None = None
    type1_exponent: float | None = None
    type2_exponent: float | None = None

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def decide(test: HypothesisTest, observations, xi: float | None = None) -> TestReport:
    """Apply the threshold rule; ties go to rejection."""
    xi = test.xi if xi is None else xi
    s = statistic(test, observations)
    rep = TestReport(s.value, s.pair_only, s.n, xi, STAND_BY if s.value > xi else REJECT)
    try:
        eb = error_bounds(test, s.n, xi)
    except ThresholdOutOfRange:
        return rep
    rep.type1_bound, rep.type2_bound = eb.type1, eb.type2
    rep.type1_exponent, rep.type2_exponent = eb.exponent1, eb.exponent2
    return rep


def parse_observations(text: str) -> list:
    """Observation file contents to a list of labels.

    If every non-blank character is ``0`` or ``1`` each character is one
    observation (whitespace and line breaks ignored); otherwise labels are
    whitespace separated.
    """
    compact = "".join(text.split())
    if compact and set(compact) <= {"0", "1"}:
        return list(compact)
    return text.split()


def load_observations(path) -> list:
    return parse_observations(Path(path).read_text())


def coin_data_path() -> Path:
    return Path(str(resources.files("markovconc") / "data" / "coin_tosses.txt"))


def coin_tosses() -> list:
    """The bundled sequence of recorded coin tosses (1 heads, 0 tails)."""
    return load_observations(coin_data_path())


def coin_test(xi: float = 0.0) -> HypothesisTest:
    """Fair i.i.d. coin against a sticky two-state chain ``[[0.6, 0.4], [0.4, 0.6]]``."""
    P0 = new_kernel(["0", "1"], [[0.5, 0.5], [0.5, 0.5]])
    P1 = new_kernel(["0", "1"], [[0.6, 0.4], [0.4, 0.6]])
    return build_test(P0, P1, xi)
