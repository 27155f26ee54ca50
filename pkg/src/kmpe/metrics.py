"""Regression and clustering metrics, plus a seeded Lloyd k-means."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DomainError


def rmse(y, yhat) -> float:
    y = np.asarray(y, dtype=float).ravel()
    yhat = np.asarray(yhat, dtype=float).ravel()
    if y.size == 0 or y.size != yhat.size:
        raise DomainError(f"need equal non-zero lengths, got {y.size} and {yhat.size}")
    d = y - yhat
    return float(np.sqrt(np.mean(d * d)))


def hungarian_map(cost) -> np.ndarray:
    """
    Minimum-cost perfect assignment on a square cost matrix.

    Returns ``perm`` with row ``a`` assigned to column ``perm[a]``.
    """
    cost = np.asarray(cost, dtype=float)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise DomainError("cost matrix must be square")
    if not np.all(np.isfinite(cost)):
        raise DomainError("cost matrix must be finite")
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(cost.shape[0], dtype=int)
    perm[rows] = cols
    return perm


def _labels(a, b):
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.size != b.size:
        raise DomainError(f"length mismatch: {a.size} vs {b.size}")
    if a.size == 0:
        raise DomainError("label vectors must be non-empty")
    if not (np.issubdtype(a.dtype, np.integer) and np.issubdtype(b.dtype, np.integer)):
        a, b = a.astype(int), b.astype(int)
    if a.min() < 0 or b.min() < 0:
        raise DomainError("labels must be nonnegative integers")
    return a, b


def contingency(pred, target, size=None) -> np.ndarray:
    """Square count matrix ``C[a, b] = #{i : pred_i = a, target_i = b}``, zero padded."""
    pred, target = _labels(pred, target)
    k = max(pred.max(), target.max()) + 1 if size is None else int(size)
    C = np.zeros((k, k), dtype=np.int64)
    np.add.at(C, (pred, target), 1)
    return C


def clustering_accuracy(pred, target) -> float:
    """Fraction of samples matching after the best one-to-one relabeling of ``pred``."""
    C = contingency(pred, target)
    perm = hungarian_map(-C)
    return float(C[np.arange(C.shape[0]), perm].sum() / C.sum())


def _entropy(counts, n):
    p = counts[counts > 0] / n
    return float(-np.sum(p * np.log(p)))


def nmi(pred, target) -> float:
    """
    Normalized mutual information ``I / sqrt(H(pred) H(target))``.

    If either labeling has a single cluster, returns 1.0 when the two
    partitions coincide and 0.0 otherwise.
    """
    pred, target = _labels(pred, target)
    n = pred.size
    _, pi = np.unique(pred, return_inverse=True)
    _, ti = np.unique(target, return_inverse=True)
    C = np.zeros((pi.max() + 1, ti.max() + 1))
    np.add.at(C, (pi, ti), 1)
    hp = _entropy(C.sum(axis=1), n)
    ht = _entropy(C.sum(axis=0), n)
    if hp == 0.0 or ht == 0.0:
        return 1.0 if hp == ht else 0.0
    nz = C > 0
    outer = np.outer(C.sum(axis=1), C.sum(axis=0))
    mi = float(np.sum(C[nz] / n * np.log(C[nz] * n / outer[nz])))
    return float(min(1.0, max(0.0, mi / np.sqrt(hp * ht))))


class KMeansResult(NamedTuple):
    labels: np.ndarray
    centers: np.ndarray
    sse_history: list
    iterations: int


def lloyd(X, k, seed=0, max_iter=300) -> KMeansResult:
    """
    Lloyd's k-means with centers initialised at ``k`` distinct samples chosen by
    a PCG64 generator seeded with ``seed``.

    ``sse_history[0]`` is the SSE of the initial assignment and one entry is
    appended after every center update.  A cluster that becomes empty is
    reseeded at the sample farthest from its current center.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = X.shape[0]
    k = int(k)
    if not 1 <= k <= n:
        raise DomainError(f"k must lie in [1, {n}], got {k}")
    rng = np.random.default_rng(seed)
    centers = X[rng.choice(n, size=k, replace=False)].copy()

    def assign(c):
        d2 = np.sum((X[:, None, :] - c[None, :, :]) ** 2, axis=2)
        lab = np.argmin(d2, axis=1)
        return lab, d2[np.arange(n), lab]

    labels, dist = assign(centers)
    history = [float(dist.sum())]
    it = 0
    for it in range(1, int(max_iter) + 1):
        for j in range(k):
            members = labels == j
            if members.any():
                centers[j] = X[members].mean(axis=0)
            else:
                far = int(np.argmax(dist))
                centers[j] = X[far]
                labels[far] = j
                dist[far] = 0.0
        # SSE of the current labels against the updated centers
        history.append(float(np.sum((X - centers[labels]) ** 2)))
        new_labels, dist = assign(centers)
        if np.array_equal(new_labels, labels):
            break
        labels = new_labels
    return KMeansResult(labels, centers, history, it)


def kmeans(X, k, seed=0, max_iter=300) -> np.ndarray:
    """Cluster labels from :func:`lloyd`."""
    return lloyd(X, k, seed, max_iter).labels
