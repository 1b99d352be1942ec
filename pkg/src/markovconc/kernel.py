"""Finite-state Markov kernels, distributions and structural constructions.

A :class:`MarkovKernel` is an immutable row-stochastic matrix with state
labels. Everything downstream (spectral quantities, mixing profiles, bound
evaluators) accepts either a kernel or a bare ``(n, n)`` array.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import (
    NegativeEntry,
    NoConvergence,
    NonStochastic,
    NonUniqueStationary,
    ShapeMismatch,
    ValidationError,
    ZeroStationaryMass,
)

STOCHASTIC_TOL = 1e-12
REVERSIBLE_TOL = 1e-10
UNIQUENESS_TOL = 1e-9


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class MarkovKernel:
    """Transition matrix ``P(x, y)`` over labelled states.

    Use :func:`new_kernel` to build one from user data; the constructor
    itself only checks shapes.
    """

    states: tuple
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(str(s) for s in self.states))
        object.__setattr__(self, "matrix", _frozen(self.matrix))
        n = len(self.states)
        if self.matrix.shape != (n, n):
            raise ShapeMismatch(f"matrix shape {self.matrix.shape} does not match {n} states")

    @property
    def n(self) -> int:
        return len(self.states)

    def index(self, label) -> int:
        return self.states.index(str(label))

    def to_dict(self) -> dict:
        return {"states": list(self.states), "matrix": self.matrix.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "MarkovKernel":
        return new_kernel(d["states"], d["matrix"])

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


@dataclass(frozen=True)
class Distribution:
    """Probability vector over labelled states."""

    states: tuple
    weights: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(str(s) for s in self.states))
        object.__setattr__(self, "weights", _frozen(self.weights))
        if self.weights.shape != (len(self.states),):
            raise ShapeMismatch("weights length does not match number of states")

    @property
    def pi_min(self) -> float:
        return float(self.weights.min())

    def to_dict(self) -> dict:
        return {"states": list(self.states), "weights": self.weights.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "Distribution":
        return new_distribution(d["states"], d["weights"])

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.weights, dtype=dtype)


def _labels(n, states=None):
    return tuple(str(i) for i in range(n)) if states is None else tuple(states)


def as_matrix(P) -> np.ndarray:
    if isinstance(P, MarkovKernel):
        return P.matrix
    P = np.asarray(P, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got shape {P.shape}")
    return P


def as_weights(pi) -> np.ndarray:
    if isinstance(pi, Distribution):
        return pi.weights
    return np.asarray(pi, dtype=float).ravel()


def new_kernel(states: Sequence | None, matrix, tol: float = STOCHASTIC_TOL) -> MarkovKernel:
    """Validate and build a kernel.

    Rows whose sum deviates from one by less than ``tol`` are renormalised;
    larger deviations raise :class:`NonStochastic`.
    """
    M = np.array(matrix, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise ShapeMismatch(f"transition matrix must be square and non-empty, got shape {M.shape}")
    n = M.shape[0]
    states = _labels(n, states)
    if len(states) != n:
        raise ShapeMismatch(f"{len(states)} labels for a {n}x{n} matrix")
    if len(set(map(str, states))) != n:
        raise ShapeMismatch("state labels must be distinct")
    if not np.all(np.isfinite(M)):
        raise NonStochastic("transition matrix has non-finite entries")
    if np.any(M < 0):
        raise NegativeEntry(f"negative transition probability {M.min()!r}")
    if np.any(M > 1):
        raise NonStochastic(f"transition probability {M.max()!r} exceeds 1")
    rows = M.sum(axis=1)
    bad = np.abs(rows - 1.0) > tol
    if np.any(bad):
        i = int(np.argmax(bad))
        raise NonStochastic(f"row {states[i]!r} sums to {rows[i]!r}")
    M = M / rows[:, None]
    return MarkovKernel(states, M)


def new_distribution(states: Sequence | None, weights, tol: float = STOCHASTIC_TOL) -> Distribution:
    w = np.array(weights, dtype=float).ravel()
    states = _labels(w.size, states)
    if len(states) != w.size:
        raise ShapeMismatch("weights length does not match number of states")
    if np.any(w < 0):
        raise NegativeEntry("negative probability")
    if abs(w.sum() - 1.0) > tol:
        raise NonStochastic(f"weights sum to {w.sum()!r}")
    return Distribution(states, w / w.sum())


def _trusted_kernel(states, M, tol=1e-8) -> MarkovKernel:
    # internal constructions: rows are stochastic up to accumulated rounding
    M = np.clip(np.asarray(M, dtype=float), 0.0, None)
    rows = M.sum(axis=1)
    if np.any(np.abs(rows - 1.0) > tol):
        raise NonStochastic(f"constructed kernel has row sums off by {np.abs(rows - 1).max():.3e}")
    return MarkovKernel(states, M / rows[:, None])


def second_eigenvalue_modulus(P) -> float:
    """Second largest eigenvalue modulus of a (not necessarily reversible) matrix."""
    P = as_matrix(P)
    if P.shape[0] < 2:
        return 0.0
    mods = np.sort(np.abs(np.linalg.eigvals(P)))[::-1]
    return float(mods[1])


def stationary_distribution(P, tol: float = 1e-13, max_iter: int = 1_000_000) -> Distribution:
    """Unique stationary distribution by power iteration on the lazy chain.

    Iterates ``pi <- pi (P + I) / 2`` from the uniform vector until successive
    iterates differ by less than ``tol`` in sup-norm. The lazy step removes
    periodicity, so ``[[0, 1], [1, 0]]`` converges. Uniqueness is checked
    first: the lazy chain must have second eigenvalue modulus below
    ``1 - 1e-9``. The iterate is then polished by a least-squares solve of
    the balance equations, kept only if its residual is no larger.
    """
    states = P.states if isinstance(P, MarkovKernel) else None
    M = as_matrix(P)
    n = M.shape[0]
    L = 0.5 * (M + np.eye(n))
    if second_eigenvalue_modulus(L) >= 1.0 - UNIQUENESS_TOL:
        raise NonUniqueStationary("eigenvalue 1 has multiplicity > 1 (reducible chain)")
    pi = np.full(n, 1.0 / n)
    LT = L.T.copy()
    for _ in range(max_iter):
        nxt = LT @ pi
        nxt /= nxt.sum()
        if np.max(np.abs(nxt - pi)) < tol:
            pi = nxt
            break
        pi = nxt
    else:
        raise NoConvergence(f"stationary power iteration did not converge in {max_iter} steps")
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    resid = np.max(np.abs(pi @ M - pi))
    # polish: one least-squares solve of pi (I - P) = 0, sum(pi) = 1
    A = np.vstack([(np.eye(n) - M).T, np.ones((1, n))])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    cand = np.clip(np.linalg.lstsq(A, b, rcond=None)[0], 0.0, None)
    cand /= cand.sum()
    cand_resid = np.max(np.abs(cand @ M - cand))
    if cand_resid <= resid:
        pi, resid = cand, cand_resid
    if resid > 1e-10:
        raise NoConvergence(f"stationary residual {resid:.3e} exceeds 1e-10")
    return Distribution(_labels(n, states), pi)


def _positive_pi(pi) -> np.ndarray:
    w = as_weights(pi)
    if np.any(w <= 0):
        raise ZeroStationaryMass("stationary distribution has zero mass on some state; restrict the kernel first")
    return w


def time_reversal(P, pi=None) -> MarkovKernel:
    """Time reversal ``P*(x, y) = pi(y) P(y, x) / pi(x)``."""
    states = P.states if isinstance(P, MarkovKernel) else None
    M = as_matrix(P)
    if pi is None:
        pi = stationary_distribution(P)
    w = _positive_pi(pi)
    R = (M.T * w[None, :]) / w[:, None]
    return _trusted_kernel(_labels(M.shape[0], states), R)


def is_reversible(P, pi=None, tol: float = REVERSIBLE_TOL) -> bool:
    """Detailed balance check ``max |pi(x)P(x,y) - pi(y)P(y,x)| <= tol``."""
    M = as_matrix(P)
    w = as_weights(stationary_distribution(P) if pi is None else pi)
    F = w[:, None] * M
    return bool(np.max(np.abs(F - F.T)) <= tol)


def pair_chain(P, pi=None, sep: str = ",", support_only: bool = False):
    """Lift ``X`` to the chain of consecutive pairs ``Y_i = (X_i, X_{i+1})``.

    ``Q((x, y), (y', z)) = 1[y = y'] P(y, z)`` with stationary law
    ``pi(x) P(x, y)``. Pairs are ordered row-major, so a two-state chain on
    ``0, 1`` gives ``00, 01, 10, 11``. With ``support_only`` the pairs with
    ``P(x, y) = 0`` are dropped (the restricted matrix is still stochastic).

    Returns
    -------
    (MarkovKernel, Distribution)
    """
    states = P.states if isinstance(P, MarkovKernel) else _labels(as_matrix(P).shape[0])
    M = as_matrix(P)
    n = M.shape[0]
    w = as_weights(stationary_distribution(P) if pi is None else pi)
    Q = np.zeros((n * n, n * n))
    for x in range(n):
        for y in range(n):
            Q[x * n + y, y * n : (y + 1) * n] = M[y]
    mass = (w[:, None] * M).ravel()
    labels = [f"{a}{sep}{b}" for a in states for b in states]
    if support_only:
        keep = np.flatnonzero(M.ravel() > 0)
        Q = Q[np.ix_(keep, keep)]
        mass = mass[keep]
        labels = [labels[i] for i in keep]
    mass = mass / mass.sum()
    return _trusted_kernel(labels, Q), Distribution(labels, mass)


def reversiblization_matrix(P, pi=None, k: int = 1) -> np.ndarray:
    """``(P*)^k P^k``, self-adjoint and positive semidefinite in ``L2(pi)``."""
    if k < 1:
        raise ValidationError("k must be >= 1")
    M = as_matrix(P)
    if pi is None:
        pi = stationary_distribution(P)
    R = time_reversal(M, pi).matrix
    Pk = np.linalg.matrix_power(M, k)
    Rk = np.linalg.matrix_power(R, k)
    return Rk @ Pk


def chi_square_nq(q, pi) -> float:
    """``N_q = sum_x q(x)^2 / pi(x)``; infinite unless ``q << pi``."""
    q = as_weights(q)
    w = as_weights(pi)
    if q.shape != w.shape:
        raise ShapeMismatch("q and pi live on different state sets")
    if np.any((q > 0) & (w <= 0)):
        return float("inf")
    m = w > 0
    return float(np.sum(q[m] ** 2 / w[m]))


def load_kernel(path) -> MarkovKernel:
    return MarkovKernel.from_dict(json.loads(Path(path).read_text()))


def load_distribution(path) -> Distribution:
    return Distribution.from_dict(json.loads(Path(path).read_text()))
