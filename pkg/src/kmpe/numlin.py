"""Dense linear algebra used by the trainers."""
from __future__ import annotations

import numpy as np
import scipy.linalg as sla

from .errors import DomainError, SingularSystemError


def _weights(lam, n):
    lam = np.asarray(lam, dtype=float).ravel()
    if lam.size != n:
        raise DomainError(f"expected {n} weights, got {lam.size}")
    if not np.all(np.isfinite(lam)) or np.any(lam < 0):
        raise DomainError("weights must be finite and nonnegative")
    return lam


def solve_regularized_weighted(H, lam, T, lambda_prime=0.0):
    """
    Solve ``(H^T diag(lam) H + lambda_prime I) beta = H^T diag(lam) T``.

    Parameters
    ----------
    H : array (N, L)
    lam : array (N,)
        Nonnegative sample weights.
    T : array (N,) or (N, C)
    lambda_prime : float
        Ridge term; zero is allowed when the weighted design has full
        column rank.

    Returns
    -------
    beta : array (L,) or (L, C), matching the shape of ``T``.

    Raises
    ------
    SingularSystemError
        If ``lambda_prime == 0`` and the weighted design is rank deficient.
    """
    H = np.asarray(H, dtype=float)
    T = np.asarray(T, dtype=float)
    if H.ndim != 2:
        raise DomainError("H must be a 2-D matrix")
    n, L = H.shape
    if T.shape[0] != n:
        raise DomainError(f"T has {T.shape[0]} rows, H has {n}")
    lam = _weights(lam, n)
    lambda_prime = float(lambda_prime)
    if lambda_prime < 0 or not np.isfinite(lambda_prime):
        raise DomainError("lambda_prime must be a nonnegative finite number")

    if lambda_prime == 0.0:
        rank = np.linalg.matrix_rank(np.sqrt(lam)[:, None] * H)
        if rank < L:
            raise SingularSystemError(rank, L)

    HtL = H.T * lam
    A = HtL @ H
    A[np.diag_indices_from(A)] += lambda_prime
    try:
        factor = sla.cho_factor(A, lower=False, check_finite=False)
    except np.linalg.LinAlgError:
        rank = np.linalg.matrix_rank(A)
        raise SingularSystemError(rank, L) from None
    return sla.cho_solve(factor, HtL @ T, check_finite=False)


def _canonical_signs(V):
    # largest-magnitude entry of each column made nonnegative
    idx = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[idx, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def sym_eig_top(S, m):
    """
    Top ``m`` eigenpairs of a symmetric matrix, eigenvalues descending.

    Each eigenvector is normalised so that its largest-magnitude entry is
    nonnegative.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise DomainError("S must be square")
    d = S.shape[0]
    m = int(m)
    if not 1 <= m <= d:
        raise DomainError(f"m must lie in [1, {d}], got {m}")
    scale = np.max(np.abs(S)) if S.size else 0.0
    if np.max(np.abs(S - S.T)) > 1e-10 * max(scale, np.finfo(float).tiny):
        raise DomainError("matrix is not symmetric")
    S = 0.5 * (S + S.T)
    vals, vecs = sla.eigh(S, subset_by_index=[d - m, d - 1])
    vals = vals[::-1]
    vecs = _canonical_signs(vecs[:, ::-1])
    return vals, vecs


def weighted_scatter(Xc, lam):
    """Weighted scatter ``Xc diag(lam) Xc^T`` for column samples ``Xc`` (d, n)."""
    Xc = np.asarray(Xc, dtype=float)
    lam = _weights(lam, Xc.shape[1])
    S = (Xc * lam) @ Xc.T
    return 0.5 * (S + S.T)


def weighted_top_directions(Xc, lam, m):
    """
    Leading ``m`` eigenvectors of :func:`weighted_scatter` without forming it
    when ``n < d``.

    For ``n < d`` the ``n x n`` matrix ``G = L^{1/2} Xc^T Xc L^{1/2}`` is
    decomposed instead and its eigenvectors are mapped back through
    ``Xc L^{1/2}``.  Falls back to the direct route if any of the leading
    ``m`` Gram eigenvalues vanishes.
    """
    Xc = np.asarray(Xc, dtype=float)
    d, n = Xc.shape
    lam = _weights(lam, n)
    if n < d and m <= n:
        B = Xc * np.sqrt(lam)
        G = B.T @ B
        vals, U = sym_eig_top(0.5 * (G + G.T), m)
        if vals[-1] > n * np.finfo(float).eps * max(vals[0], 0.0):
            V = (B @ U) / np.sqrt(vals)
            # one re-orthonormalisation pass against rounding
            V, _ = np.linalg.qr(V)
            return vals, _canonical_signs(V)
    return sym_eig_top(weighted_scatter(Xc, lam), m)
