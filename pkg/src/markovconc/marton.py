"""Mixing matrices of Marton couplings and the dependent McDiarmid bound."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatch, ValidationError
from .kernel import as_matrix
from .linalg import top_singular_value
from .results import exp_tail

MAX_BLOCKS = 10_000


@dataclass(frozen=True)
class Partition:
    """Contiguous blocks of ``range(N)``, each stored as a half-open ``(start, stop)``."""

    blocks: tuple

    @property
    def N(self) -> int:
        return self.blocks[-1][1] if self.blocks else 0

    @property
    def size(self) -> int:
        return max(b - a for a, b in self.blocks)

    def __len__(self):
        return len(self.blocks)

    def to_dict(self) -> dict:
        # 1-based inclusive ranges, as in the usual index notation
        return {"blocks": [[a + 1, b] for a, b in self.blocks], "size": self.size}


def block_partition(N: int, block_size: int) -> Partition:
    if block_size < 1:
        raise ValidationError("block_size must be >= 1")
    if N < 1:
        raise ValidationError("N must be >= 1")
    return Partition(tuple((a, min(a + block_size, N)) for a in range(0, N, block_size)))


def block_weights(c, partition: Partition) -> np.ndarray:
    """``C_i(c) = sum of c_j over block i``."""
    c = np.asarray(c, dtype=float)
    if c.shape != (partition.N,):
        raise ShapeMismatch(f"c has length {c.size}, partition covers {partition.N} indices")
    return np.array([c[a:b].sum() for a, b in partition.blocks])


def _check_dim(n):
    if n < 1:
        raise ValidationError("need at least one block")
    if n > MAX_BLOCKS:
        raise ValidationError(f"{n} blocks exceeds the dense guard of {MAX_BLOCKS}")


def markov_mixing_matrix(n_blocks: int, eps: float) -> np.ndarray:
    """Upper triangular ``Gamma`` whose rows read ``1, 1, eps, eps, eps^2, eps^2, ...``.

    ``Gamma[i, j] = eps ** ((j - i) // 2)`` for ``j >= i``.
    """
    _check_dim(n_blocks)
    if not 0 <= eps < 1:
        raise ValidationError("eps must lie in [0, 1)")
    i, j = np.indices((n_blocks, n_blocks))
    off = j - i
    G = np.where(off >= 0, np.power(float(eps), np.maximum(off, 0) // 2), 0.0)
    return G


def mdep_mixing_matrix(n_blocks: int) -> np.ndarray:
    """Bidiagonal matrix of ones (m-dependent blocks)."""
    _check_dim(n_blocks)
    return np.eye(n_blocks) + np.eye(n_blocks, k=1)


def operator_norm(G, rtol: float = 1e-12) -> float:
    """Largest singular value of ``G`` (power iteration on ``G^T G``)."""
    G = np.asarray(G, dtype=float)
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise ShapeMismatch("operator_norm expects a square matrix")
    return top_singular_value(G, rtol=rtol)


def mgf_log_bound(G, Cc, lam: float) -> float:
    """``lambda^2 ||Gamma C(c)||^2 / 8`` bounding the centred log-MGF."""
    v = _apply(G, Cc)
    return lam * lam * float(v @ v) / 8.0


def _apply(G, Cc):
    G = np.asarray(G, dtype=float)
    Cc = np.asarray(Cc, dtype=float)
    if G.shape != (Cc.size, Cc.size):
        raise ShapeMismatch(f"Gamma {G.shape} does not match C(c) of length {Cc.size}")
    return G @ Cc


def mcdiarmid_general_tail(G, Cc, t: float, one_sided: bool = False):
    """``min(1, 2 exp(-2 t^2 / ||Gamma C(c)||^2))``.

    A zero weight vector gives a degenerate function: the tail is 1 at
    ``t = 0`` and 0 beyond.
    """
    if t < 0:
        raise ValidationError("t must be non-negative")
    v = _apply(G, Cc)
    s = float(v @ v)
    if t == 0:
        E = 0.0
    elif s == 0:
        E = math.inf
    else:
        E = 2.0 * t * t / s
    return exp_tail(E, "mcdiarmid_general", one_sided=one_sided, inputs={"norm_GammaC2": s, "t": t})


def one_step_contraction(P) -> float:
    """``a = max_{x,y} d_TV(P(x, .), P(y, .))``, the one-step Dobrushin coefficient."""
    M = as_matrix(P)
    n = M.shape[0]
    best = 0.0
    for x in range(n - 1):
        best = max(best, float(0.5 * np.abs(M[x + 1 :] - M[x]).sum(axis=1).max()))
    return best
