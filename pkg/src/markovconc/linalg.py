"""Small dense linear algebra kernels: cyclic Jacobi and a guarded solve."""

import warnings

import numpy as np
import scipy.linalg

from .errors import NoConvergence, SingularResolvent


def _off_norm(A):
    # direct sum; ||A||^2 - ||diag||^2 cancels down to sqrt(eps) * ||A||
    B = A.copy()
    np.fill_diagonal(B, 0.0)
    return np.linalg.norm(B)


def jacobi_eigh(A, tol=1e-13, max_sweeps=100, vectors=False):
    r"""Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    A : (n, n) array_like
        Symmetric matrix. Only the symmetric part is used.
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm is below
        ``tol * max(1, ||A||_F)``.
    max_sweeps : int
        Hard limit on the number of full sweeps.
    vectors : bool
        Also return the orthogonal matrix of eigenvectors (as columns).

    Returns
    -------
    w : (n,) ndarray
        Eigenvalues sorted in descending order.
    V : (n, n) ndarray
        Only if ``vectors`` is True; ``A @ V[:, i] = w[i] * V[:, i]``.
    """
    A = np.array(A, dtype=float)
    A = 0.5 * (A + A.T)
    n = A.shape[0]
    V = np.eye(n)
    scale = max(1.0, np.linalg.norm(A))
    for _ in range(max_sweeps):
        off = _off_norm(A)
        if off < tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(theta, 1.0))
                c = 1.0 / np.hypot(t, 1.0)
                s = t * c
                rp = A[p, :].copy()
                rq = A[q, :].copy()
                A[p, :] = c * rp - s * rq
                A[q, :] = s * rp + c * rq
                cp = A[:, p].copy()
                cq = A[:, q].copy()
                A[:, p] = c * cp - s * cq
                A[:, q] = s * cp + c * cq
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    else:
        off = _off_norm(A)
        if off >= tol * scale:
            raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps (off={off:.3e})")
    w = np.diag(A).copy()
    order = np.argsort(-w, kind="stable")
    if vectors:
        return w[order], V[:, order]
    return w[order]


def guarded_solve(A, b, rel_pivot_tol=1e-12):
    """Solve ``A x = b`` by LU with partial pivoting.

    Raises :class:`SingularResolvent` when some pivot is below
    ``rel_pivot_tol * ||A||_inf``.
    """
    A = np.asarray(A, dtype=float)
    norm_inf = np.abs(A).sum(axis=1).max() if A.size else 0.0
    with warnings.catch_warnings():
        # singularity is reported below through our own pivot test
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        lu, piv = scipy.linalg.lu_factor(A, check_finite=True)
    pivots = np.abs(np.diag(lu))
    if norm_inf == 0.0 or pivots.min() < rel_pivot_tol * norm_inf:
        raise SingularResolvent(
            f"matrix is numerically singular (min pivot {pivots.min():.3e}, ||A||_inf {norm_inf:.3e})"
        )
    return scipy.linalg.lu_solve((lu, piv), b)


def top_singular_value(G, rtol=1e-12, max_iter=10_000, squarings=40):
    """Largest singular value of ``G`` by power iteration on ``G^T G``.

    The iteration starts from the normalised all-ones vector. To keep the
    iteration count small for nearly degenerate spectra the Gram matrix is
    first raised to a power ``2**m`` by repeated squaring (rescaled at every
    step), which is the same power iteration run ``2**m`` steps at once. Plain
    power steps then polish the Rayleigh quotient until it changes by less
    than ``rtol`` relatively.
    """
    G = np.asarray(G, dtype=float)
    if G.ndim != 2:
        raise ValueError("expected a matrix")
    B = G.T @ G
    n = B.shape[0]
    if n == 0 or not np.any(B):
        return 0.0
    v = np.ones(n) / np.sqrt(n)
    Bk = B / np.abs(B).max()
    w = v.copy()
    for _ in range(squarings):
        Bk = Bk @ Bk
        m = np.abs(Bk).max()
        if m == 0.0 or not np.isfinite(m):
            break
        Bk /= m
        w_new = Bk @ v
        nw = np.linalg.norm(w_new)
        if nw == 0.0:
            # start vector orthogonal to the dominant space at this power
            break
        w_new /= nw
        if np.linalg.norm(w_new - w) < 1e-15:
            w = w_new
            break
        w = w_new
    if np.linalg.norm(B @ w) == 0.0:
        w = v
    rho = float(w @ B @ w)
    for _ in range(max_iter):
        x = B @ w
        nx = np.linalg.norm(x)
        if nx == 0.0:
            return 0.0
        w = x / nx
        rho_new = float(w @ B @ w)
        if abs(rho_new - rho) <= rtol * abs(rho_new):
            return float(np.sqrt(max(rho_new, 0.0)))
        rho = rho_new
    raise NoConvergence(f"power iteration did not reach rtol={rtol} in {max_iter} steps")
