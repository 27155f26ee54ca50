"""
L2-PCA and the KMPE-weighted robust PCA (IRLS on column residual norms).

Data matrices are ``(d, n)``: one sample per column.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .core import KernelParams, kmpe_weight
from .errors import DegenerateWeightsError, DivergenceError, DomainError
from .numlin import weighted_top_directions

SIGMA_FLOOR = 1e-8


@dataclass(frozen=True)
class Subspace:
    """Affine subspace ``mu + range(W)`` with orthonormal columns in ``W``."""

    W: np.ndarray
    mu: np.ndarray

    def __post_init__(self):
        W = np.asarray(self.W, dtype=float)
        mu = np.asarray(self.mu, dtype=float).ravel()
        if W.ndim != 2 or W.shape[0] != mu.size:
            raise DomainError("W must be (d, m) with d == len(mu)")
        if W.shape[1]:
            gram = W.T @ W
            if np.max(np.abs(gram - np.eye(W.shape[1]))) >= 1e-8:
                raise DomainError("columns of W are not orthonormal")
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "mu", mu)

    @property
    def d(self):
        return self.W.shape[0]

    @property
    def m(self):
        return self.W.shape[1]


@dataclass(frozen=True)
class PcaConfig:
    """
    Settings for :func:`fit_kmpe`.

    ``sigma=None`` selects the bandwidth from the current residuals on every
    iteration (:func:`silverman_bandwidth`).  ``m_r`` is the working
    dimension of the iteration; the result is truncated to ``m`` columns.
    """

    m: int
    p: float = 2.0
    sigma: float | None = None
    max_iter: int = 100
    tol: float = 1e-6
    m_r: int | None = None

    def __post_init__(self):
        if int(self.m) < 1:
            raise DomainError("m must be >= 1")
        if not self.tol > 0:
            raise DomainError("tol must be positive")
        if int(self.max_iter) < 1:
            raise DomainError("max_iter must be >= 1")
        if self.m_r is not None and int(self.m_r) < int(self.m):
            raise DomainError("m_r must be >= m")
        # validates p (and sigma when fixed)
        KernelParams(1.0 if self.sigma is None else self.sigma, self.p)

    @property
    def working_dim(self):
        return int(self.m if self.m_r is None else self.m_r)


@dataclass
class PcaTrace:
    objective: list = field(default_factory=list)
    sigmas: list = field(default_factory=list)
    changes: list = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


def _data(X):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DomainError("X must be a (d, n) matrix")
    if not np.all(np.isfinite(X)):
        raise DomainError("X contains non-finite values")
    return X


def fit_l2(X, m) -> Subspace:
    """Ordinary PCA: sample mean and the top ``m`` eigenvectors of the scatter."""
    X = _data(X)
    d, n = X.shape
    m = int(m)
    if not 1 <= m <= min(d, n):
        raise DomainError(f"m must lie in [1, {min(d, n)}], got {m}")
    mu = X.mean(axis=1)
    _, W = weighted_top_directions(X - mu[:, None], np.ones(n), m)
    return Subspace(W, mu)


def residuals(sub: Subspace, X) -> np.ndarray:
    """Per-column residuals ``(x - mu) - W W^T (x - mu)``."""
    X = _data(X)
    if X.shape[0] != sub.d:
        raise DomainError(f"X has {X.shape[0]} rows, subspace dimension is {sub.d}")
    Xc = X - sub.mu[:, None]
    return Xc - sub.W @ (sub.W.T @ Xc)


def irls_weights(E, params: KernelParams) -> np.ndarray:
    """KMPE reweighting of each column of ``E`` by its Euclidean norm."""
    E = _data(E)
    return kmpe_weight(np.sqrt(np.sum(E * E, axis=0)), params)


def weighted_mean(X, lam) -> np.ndarray:
    X = _data(X)
    lam = np.asarray(lam, dtype=float).ravel()
    if lam.size != X.shape[1]:
        raise DomainError("need one weight per column")
    total = lam.sum()
    if not total > 0:
        raise DegenerateWeightsError("all sample weights are zero")
    return (X @ lam) / total


def silverman_bandwidth(E) -> float:
    """
    Kernel width from the spread of squared residual norms.

    With ``s_i = ||e_i||^2``, the rule sets
    ``sigma^2 = 1.06 * min(std(s), IQR(s) / 1.354) * n^(-1/5)``.  The standard
    deviation uses ``ddof=1`` and the quartiles are linearly interpolated.
    The result is floored at ``1e-8``.
    """
    E = _data(E)
    n = E.shape[1]
    if n < 2:
        raise DomainError("need at least two residual columns")
    s = np.sum(E * E, axis=0)
    spread = float(np.std(s, ddof=1))
    q1, q3 = np.percentile(s, [25, 75])
    sigma2 = 1.06 * min(spread, float(q3 - q1) / 1.354) * n ** -0.2
    return max(math.sqrt(max(sigma2, 0.0)), SIGMA_FLOOR)


def _objective(E, params):
    n2 = np.sum(E * E, axis=0)
    return float(np.mean((-np.expm1(-n2 / (2.0 * params.sigma ** 2))) ** (params.p / 2.0)))


def fit_kmpe(X, cfg: PcaConfig):
    """
    Robust PCA under the KMPE loss by iteratively reweighted eigen-updates.

    Starts from the L2-PCA solution.  Each iteration computes residuals,
    per-sample weights, the weighted mean, and the leading eigenvectors of
    the weighted scatter.  Stops when the spectral norm of the change in
    ``W`` (after matching column signs) is at most ``cfg.tol``.

    Returns
    -------
    Subspace, PcaTrace
    """
    X = _data(X)
    d, n = X.shape
    mr = cfg.working_dim
    if mr > min(d, n):
        raise DomainError(f"working dimension {mr} exceeds min(d, n) = {min(d, n)}")
    sub = fit_l2(X, mr)
    W, mu = sub.W, sub.mu
    trace = PcaTrace()
    for k in range(1, int(cfg.max_iter) + 1):
        E = residuals(Subspace(W, mu), X)
        sigma = silverman_bandwidth(E) if cfg.sigma is None else cfg.sigma
        params = KernelParams(sigma, cfg.p)
        lam = irls_weights(E, params)
        mu = weighted_mean(X, lam)
        _, W_new = weighted_top_directions(X - mu[:, None], lam, mr)
        signs = np.sign(np.sum(W_new * W, axis=0))
        signs[signs == 0] = 1.0
        change = float(np.linalg.norm(W - W_new * signs, 2))
        W = W_new
        obj = _objective(residuals(Subspace(W, mu), X), params)
        if not math.isfinite(obj):
            raise DivergenceError(k)
        trace.objective.append(obj)
        trace.sigmas.append(sigma)
        trace.changes.append(change)
        trace.iterations = k
        if change <= cfg.tol:
            trace.converged = True
            break
    return Subspace(W[:, : cfg.m], mu), trace


def avg_reconstruction_error(sub: Subspace, X_clean, X_train) -> float:
    """Mean distance between clean columns and reconstructions of the training columns."""
    Xo, X = _data(X_clean), _data(X_train)
    if Xo.shape != X.shape:
        raise DomainError(f"shape mismatch: {Xo.shape} vs {X.shape}")
    if X.shape[0] != sub.d:
        raise DomainError("data dimension does not match the subspace")
    mu = sub.mu[:, None]
    R = (Xo - mu) - sub.W @ (sub.W.T @ (X - mu))
    return float(np.mean(np.sqrt(np.sum(R * R, axis=0))))


def save_subspace(path, sub: Subspace, kernel: KernelParams | None = None):
    meta = {"format": "kmpe-subspace", "version": 1, "d": sub.d, "m": sub.m,
            "sigma": None if kernel is None else kernel.sigma,
            "p": None if kernel is None else kernel.p}
    with open(path, "wb") as fh:
        np.savez(fh, meta=np.array(json.dumps(meta)), W=sub.W, mu=sub.mu)


def load_subspace(path):
    """Returns ``(Subspace, KernelParams | None)``."""
    with np.load(path, allow_pickle=False) as z:
        meta = json.loads(str(z["meta"]))
        if meta.get("format") != "kmpe-subspace":
            raise DomainError(f"{path}: not a subspace file")
        sub = Subspace(z["W"], z["mu"])
    kernel = None if meta["sigma"] is None else KernelParams(meta["sigma"], meta["p"])
    return sub, kernel
