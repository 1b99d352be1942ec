"""Spectral quantities in the pi-weighted geometry.

All eigenvalue computations go through :func:`eigenvalues_self_adjoint`,
which symmetrises an operator that is self-adjoint in ``L2(pi)`` as
``D^{1/2} M D^{-1/2}`` (``D = diag(pi)``) and diagonalises it with cyclic
Jacobi rotations.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import NotReversible, NotSelfAdjoint, SearchExhaustedWarning, ShapeMismatch, ValidationError, ZeroStationaryMass
from .kernel import (
    MarkovKernel,
    as_matrix,
    as_weights,
    is_reversible,
    stationary_distribution,
    time_reversal,
)
from .linalg import guarded_solve, jacobi_eigh

MULTIPLICITY_TOL = 1e-9
SELF_ADJOINT_TOL = 1e-10
DEFAULT_K_MAX = 64


def _pi(P, pi):
    return as_weights(stationary_distribution(P) if pi is None else pi)


def eigenvalues_self_adjoint(M, pi, tol: float = SELF_ADJOINT_TOL) -> np.ndarray:
    """Real spectrum of an operator self-adjoint in ``L2(pi)``, descending."""
    M = as_matrix(M)
    w = as_weights(pi)
    if np.any(w <= 0):
        raise ZeroStationaryMass("pi must be strictly positive")
    s = np.sqrt(w)
    S = s[:, None] * M / s[None, :]
    asym = np.max(np.abs(S - S.T)) if S.size else 0.0
    if asym > tol:
        raise NotSelfAdjoint(f"operator is not self-adjoint in L2(pi) (asymmetry {asym:.3e})")
    return jacobi_eigh(S)


def _gap_from_eigs(eigs) -> float:
    if len(eigs) < 2:
        return 1.0
    if eigs[1] >= 1.0 - MULTIPLICITY_TOL:
        return 0.0
    return float(1.0 - eigs[1])


def _require_reversible(P, w):
    if not is_reversible(P, w):
        raise NotReversible("kernel does not satisfy detailed balance")


def spectral_gap(P, pi=None) -> float:
    """``1 - lambda_2`` for a reversible kernel; 0 if eigenvalue 1 is repeated.

    Lies in ``[0, 2]``: the periodic flip ``[[0, 1], [1, 0]]`` has gap 2.
    """
    w = _pi(P, pi)
    _require_reversible(P, w)
    return _gap_from_eigs(eigenvalues_self_adjoint(P, w))


def absolute_spectral_gap(P, pi=None) -> float:
    """``1 - max |lambda|`` over the non-top spectrum of a reversible kernel."""
    w = _pi(P, pi)
    _require_reversible(P, w)
    eigs = eigenvalues_self_adjoint(P, w)
    if len(eigs) < 2:
        return 1.0
    if eigs[1] >= 1.0 - MULTIPLICITY_TOL:
        return 0.0
    return float(max(0.0, 1.0 - np.max(np.abs(eigs[1:]))))


@dataclass(frozen=True)
class PseudoSpectralGap:
    gamma_ps: float
    k_ps: int
    eigenvalues_by_k: dict = field(repr=False)
    exhausted: bool = False

    def __iter__(self):
        return iter((self.gamma_ps, self.k_ps, self.eigenvalues_by_k))


def pseudo_spectral_gap(P, pi=None, k_max: int | None = None, t_mix: int | None = None) -> PseudoSpectralGap:
    """Pseudo spectral gap ``max_k gap((P*)^k P^k) / k`` and its smallest maximiser.

    Since ``gap((P*)^k P^k) <= 1`` the term for ``k`` is at most ``1/k``, so the
    scan stops at the first ``k`` with ``1/k <= best``; no later ``k`` can win.
    ``k_max`` caps the scan (default ``4 * t_mix`` if a mixing time is given,
    else 64). If the cap is reached with every gap zero a
    :class:`SearchExhaustedWarning` is issued and ``exhausted`` is set.
    """
    M = as_matrix(P)
    w = _pi(P, pi)
    if k_max is None:
        k_max = 4 * int(np.ceil(t_mix)) if t_mix else DEFAULT_K_MAX
    R = time_reversal(M, w).matrix
    Pk = np.eye(M.shape[0])
    Rk = np.eye(M.shape[0])
    best, k_best = 0.0, 1
    eig_by_k = {}
    exhausted = False
    for k in range(1, k_max + 1):
        if 1.0 / k <= best:
            break
        Pk = Pk @ M
        Rk = Rk @ R
        eigs = eigenvalues_self_adjoint(Rk @ Pk, w, tol=1e-8)
        eig_by_k[k] = eigs
        val = min(_gap_from_eigs(eigs), 1.0) / k
        # strict improvement keeps the smallest maximiser
        if val > best + 1e-12:
            best, k_best = val, k
    else:
        if best == 0.0:
            exhausted = True
            warnings.warn(f"no positive gap of (P*)^k P^k for k <= {k_max}", SearchExhaustedWarning, stacklevel=2)
    return PseudoSpectralGap(best, k_best, eig_by_k, exhausted)


def _centered(f, w):
    f = np.asarray(f, dtype=float).ravel()
    if f.shape != w.shape:
        raise ShapeMismatch(f"function has {f.size} values for {w.size} states")
    return f - w @ f


def stationary_variance(f, pi) -> float:
    w = as_weights(pi)
    g = _centered(f, w)
    return float(w @ (g * g))


def asymptotic_variance(P, pi=None, f=None) -> float:
    r"""Asymptotic variance ``lim Var(f(X_1)+...+f(X_N)) / N`` under ``pi``.

    Uses the fundamental-matrix identity
    :math:`\sigma^2 = \langle g, [2(I-(P-\Pi))^{-1}-I] g\rangle_\pi`
    with ``g = f - E_pi f``.
    """
    M = as_matrix(P)
    w = _pi(P, pi)
    g = _centered(f, w)
    n = M.shape[0]
    A = np.eye(n) - (M - np.outer(np.ones(n), w))
    x = guarded_solve(A, g)
    val = float(2.0 * (w @ (g * x)) - w @ (g * g))
    if val < 0 and val > -1e-10:
        val = 0.0
    return val


def exact_sum_variance(P, pi=None, f=None, n: int = 1) -> float:
    """Exact ``Var_pi(f(X_1) + ... + f(X_n))`` for the stationary chain.

    ``n V_f + 2 sum_{k=1}^{n-1} (n-k) <g, P^k g>_pi`` with ``g`` centred.
    """
    if n < 1:
        raise ValidationError("n must be >= 1")
    M = as_matrix(P)
    w = _pi(P, pi)
    g = _centered(f, w)
    total = n * float(w @ (g * g))
    h = g.copy()
    for k in range(1, n):
        h = M @ h
        h -= w @ h
        total += 2.0 * (n - k) * float(w @ (g * h))
    return total


def exact_sum_variance_general(P, pi=None, fs=None) -> float:
    """Exact ``Var_pi(f_1(X_1) + ... + f_n(X_n))`` for per-time functions.

    ``fs`` is a sequence of length-``|Omega|`` arrays (or an ``(n, |Omega|)``
    array). Runs the backward recursion ``u_i = g_i + P u_{i+1}``.
    """
    M = as_matrix(P)
    w = _pi(P, pi)
    G = [_centered(f, w) for f in fs]
    total = 0.0
    u = np.zeros_like(w)
    for g in reversed(G):
        Pu = M @ u
        Pu -= w @ Pu
        total += float(w @ (g * g)) + 2.0 * float(w @ (g * Pu))
        u = g + Pu
    return total


@dataclass
class SpectralReport:
    gamma: float | None
    gamma_star: float | None
    gamma_ps: float
    k_ps: int
    eigenvalues_by_k: dict
    reversible: bool
    pi: list
    eigenvalues: list | None = None
    exhausted: bool = False

    def to_dict(self, digits: int = 15) -> dict:
        r = lambda x: None if x is None else float(f"{x:.{digits}g}")
        return {
            "gamma": r(self.gamma),
            "gamma_star": r(self.gamma_star),
            "gamma_ps": r(self.gamma_ps),
            "k_ps": self.k_ps,
            "eigenvalues_by_k": {str(k): [r(v) for v in e] for k, e in self.eigenvalues_by_k.items()},
            "reversible": self.reversible,
            "pi": [r(v) for v in self.pi],
            "eigenvalues": None if self.eigenvalues is None else [r(v) for v in self.eigenvalues],
            "search_exhausted": self.exhausted,
        }


def spectral_report(P, pi=None, k_max: int | None = None, t_mix: int | None = None) -> SpectralReport:
    """Collect gap, absolute gap (reversible kernels only) and pseudo gap."""
    w = _pi(P, pi)
    rev = is_reversible(P, w)
    gamma = gamma_star = eigs = None
    if rev:
        eigs = eigenvalues_self_adjoint(P, w)
        gamma = _gap_from_eigs(eigs)
        gamma_star = absolute_spectral_gap(P, w)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SearchExhaustedWarning)
        ps = pseudo_spectral_gap(P, w, k_max=k_max, t_mix=t_mix)
    return SpectralReport(
        gamma=gamma,
        gamma_star=gamma_star,
        gamma_ps=ps.gamma_ps,
        k_ps=ps.k_ps,
        eigenvalues_by_k={k: list(map(float, e)) for k, e in ps.eigenvalues_by_k.items()},
        reversible=rev,
        pi=list(map(float, w)),
        eigenvalues=None if eigs is None else list(map(float, eigs)),
        exhausted=ps.exhausted,
    )
