"""
Synthetic generators, CSV ingestion, min-max scaling and train/test splits.

Datasets store one sample per row.  The PCA routines take one sample per
column, so pass ``ds.X.T`` there.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParseError

BACKGROUNDS = ("uniform", "sine")


@dataclass(frozen=True)
class NoiseModel:
    """
    Impulsive mixture noise ``v = (1 - a) A + a B``.

    ``a`` is Bernoulli(``c``), ``B`` is normal with standard deviation
    ``outlier_std`` and ``A`` is the background: uniform on ``[low, high]``
    or ``sin(w)`` with ``w`` uniform on ``[0, 2 pi]``.
    """

    c: float = 0.1
    background: str = "uniform"
    low: float = -1.0
    high: float = 1.0
    outlier_std: float = 3.0

    def __post_init__(self):
        if not 0.0 <= self.c <= 1.0:
            raise DomainError(f"c must lie in [0, 1], got {self.c}")
        if self.background not in BACKGROUNDS:
            raise DomainError(f"background must be one of {BACKGROUNDS}, got {self.background!r}")
        if not self.low <= self.high:
            raise DomainError("need low <= high")
        if not self.outlier_std > 0:
            raise DomainError("outlier_std must be positive")

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        # fixed draw order: mixture flags, impulses, background
        a = rng.random(n) < self.c
        impulses = rng.normal(0.0, self.outlier_std, n)
        if self.background == "uniform":
            background = rng.uniform(self.low, self.high, n)
        else:
            background = np.sin(rng.uniform(0.0, 2.0 * np.pi, n))
        return np.where(a, impulses, background)

    def variance(self) -> float:
        """Variance of ``v`` implied by the model."""
        if self.background == "uniform":
            var_a, mean_a = (self.high - self.low) ** 2 / 12.0, 0.5 * (self.low + self.high)
        else:
            var_a, mean_a = 0.5, 0.0
        # mixture of two components, B has mean zero
        second = (1 - self.c) * (var_a + mean_a ** 2) + self.c * self.outlier_std ** 2
        mean = (1 - self.c) * mean_a
        return second - mean ** 2


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray
    targets: np.ndarray | None = None
    feature_names: tuple | None = None

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2:
            raise DomainError("X must be a 2-D matrix")
        if not np.all(np.isfinite(X)):
            raise DomainError("X contains non-finite values")
        T = self.targets
        if T is not None:
            T = np.asarray(T, dtype=float)
            if T.ndim == 1:
                T = T[:, None]
            if T.shape[0] != X.shape[0]:
                raise DomainError(f"targets have {T.shape[0]} rows, X has {X.shape[0]}")
            if not np.all(np.isfinite(T)):
                raise DomainError("targets contain non-finite values")
        names = self.feature_names
        if names is not None:
            names = tuple(str(s) for s in names)
            if len(names) != X.shape[1]:
                raise DomainError("need one feature name per column")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "targets", T)
        object.__setattr__(self, "feature_names", names)

    def __len__(self):
        return self.X.shape[0]


def sinc(x):
    """``sin(x) / x`` with ``sinc(0) = 1`` (unnormalised)."""
    x = np.asarray(x, dtype=float)
    safe = np.where(x == 0.0, 1.0, x)
    return np.where(x == 0.0, 1.0, np.sin(safe) / safe)


def gen_sinc(n_train, n_test, noise: NoiseModel = NoiseModel(), seed=0):
    """
    Noisy ``8 sinc(x)`` regression data with ``x`` uniform on ``[-10, 10]``.

    Training targets carry ``noise``; test targets are the exact curve.
    Draw order from one PCG64 stream: train inputs, train noise, test inputs.
    """
    n_train, n_test = int(n_train), int(n_test)
    if n_train < 1 or n_test < 1:
        raise DomainError("sample counts must be >= 1")
    rng = np.random.default_rng(seed)
    x_tr = rng.uniform(-10.0, 10.0, n_train)
    y_tr = 8.0 * sinc(x_tr) + noise.sample(rng, n_train)
    x_te = rng.uniform(-10.0, 10.0, n_test)
    y_te = 8.0 * sinc(x_te)
    names = ("x",)
    return Dataset(x_tr, y_tr, names), Dataset(x_te, y_te, names)


CORRUPTION_MODES = ("occlusion", "dummy")


def gen_lowrank_corrupted(d, n, r, outlier_frac, mode="occlusion", seed=0, noise_std=0.01):
    """
    Rank-``r`` data plus small noise, and a copy with gross outliers.

    The clean matrix is ``U V + noise`` (``U`` is d x r, ``V`` is r x n).
    ``ceil(outlier_frac * n)`` samples are corrupted.  Each corrupted entry
    is set to the clean data's minimum or maximum with equal probability,
    chosen per entry.  Occlusion overwrites a contiguous block of length
    uniform in ``[ceil(d/4), floor(d/2)]``; dummy mode overwrites the whole
    sample.

    Returns
    -------
    clean, corrupted : Dataset
        Samples as rows (n x d).
    """
    d, n, r = int(d), int(n), int(r)
    if d < 1 or n < 1 or not 1 <= r <= min(d, n):
        raise DomainError("need d, n >= 1 and 1 <= r <= min(d, n)")
    if not 0.0 <= outlier_frac < 1.0:
        raise DomainError(f"outlier_frac must lie in [0, 1), got {outlier_frac}")
    if mode not in CORRUPTION_MODES:
        raise DomainError(f"mode must be one of {CORRUPTION_MODES}, got {mode!r}")
    rng = np.random.default_rng(seed)
    clean = rng.standard_normal((d, r)) @ rng.standard_normal((r, n))
    clean += noise_std * rng.standard_normal((d, n))
    corrupted = clean.copy()
    lo, hi = clean.min(), clean.max()
    count = math.ceil(outlier_frac * n)
    block_min, block_max = math.ceil(0.25 * d), max(math.floor(0.5 * d), math.ceil(0.25 * d))
    for col in rng.choice(n, size=count, replace=False):
        if mode == "dummy":
            idx = np.arange(d)
        else:
            length = int(rng.integers(block_min, block_max + 1))
            start = int(rng.integers(0, d - length + 1))
            idx = np.arange(start, start + length)
        corrupted[idx, col] = np.where(rng.random(idx.size) < 0.5, lo, hi)
    return Dataset(clean.T), Dataset(corrupted.T)


def load_csv(path, target_columns=()) -> Dataset:
    """
    Read a numeric CSV with a header row.

    ``target_columns`` holds column indices (or header names) that become
    targets; the rest become features.  Raises :class:`ParseError` with the
    1-based line number on ragged rows or non-numeric cells.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParseError("empty file", line=1)
    header = [h.strip() for h in rows[0]]
    width = len(header)
    wanted = []
    for t in target_columns:
        if isinstance(t, str) and not t.lstrip("-").isdigit():
            if t not in header:
                raise ParseError(f"unknown target column {t!r}", line=1)
            wanted.append(header.index(t))
        else:
            idx = int(t)
            if not -width <= idx < width:
                raise ParseError(f"target column {idx} out of range", line=1)
            wanted.append(idx % width)
    values = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != width:
            raise ParseError(f"expected {width} fields, got {len(row)}", line=lineno)
        try:
            values.append([float(c) for c in row])
        except ValueError as exc:
            raise ParseError(f"non-numeric cell: {exc}", line=lineno) from None
    if not values:
        raise ParseError("no data rows", line=len(rows))
    data = np.array(values)
    if not np.all(np.isfinite(data)):
        bad = int(np.nonzero(~np.all(np.isfinite(data), axis=1))[0][0])
        raise ParseError("non-finite value", line=bad + 2)
    features = [j for j in range(width) if j not in wanted]
    targets = data[:, wanted] if wanted else None
    return Dataset(data[:, features], targets, [header[j] for j in features])


def write_csv(path, ds: Dataset, target_names=None):
    """Write features then targets with a header row; floats use repr so reads are exact."""
    names = list(ds.feature_names or [f"x{j}" for j in range(ds.X.shape[1])])
    cols = [ds.X]
    if ds.targets is not None:
        k = ds.targets.shape[1]
        names += list(target_names or [f"t{j}" for j in range(k)])
        cols.append(ds.targets)
    data = np.hstack(cols)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(names)
        for row in data:
            writer.writerow([repr(float(v)) for v in row])


@dataclass(frozen=True)
class MinMaxScaler:
    """Per-feature affine map onto ``[0, 1]`` from fitted minima and ranges."""

    low: np.ndarray
    span: np.ndarray

    def apply(self, ds: Dataset) -> Dataset:
        if ds.X.shape[1] != self.low.size:
            raise DomainError("feature count does not match the scaler")
        safe = np.where(self.span > 0, self.span, 1.0)
        X = np.where(self.span > 0, (ds.X - self.low) / safe, 0.0)
        return Dataset(X, ds.targets, ds.feature_names)


def normalize01(ds: Dataset):
    """
    Scale each feature of ``ds`` to ``[0, 1]`` by its own min and max.

    Constant columns map to 0.  Returns the scaled dataset and the scaler so
    held-out data can reuse the training statistics.
    """
    low = ds.X.min(axis=0)
    scaler = MinMaxScaler(low, ds.X.max(axis=0) - low)
    return scaler.apply(ds), scaler


def split(ds: Dataset, train_frac, seed=0):
    """Shuffle rows with a seeded generator and cut at ``round(train_frac * n)``."""
    if not 0.0 < train_frac < 1.0:
        raise DomainError(f"train_frac must lie in (0, 1), got {train_frac}")
    n = len(ds)
    order = np.random.default_rng(seed).permutation(n)
    cut = min(max(int(round(train_frac * n)), 1), n - 1) if n > 1 else n
    parts = []
    for idx in (order[:cut], order[cut:]):
        T = None if ds.targets is None else ds.targets[idx]
        parts.append(Dataset(ds.X[idx], T, ds.feature_names))
    return parts[0], parts[1]


def gen_clusters(d, k, n_per_cluster, n_outliers, seed=0, r=None, separation=6.0,
                 outlier_scale=10.0, noise_std=0.05):
    """
    Gaussian clusters inside a random ``r``-dimensional subspace of R^d, plus
    isotropic gross outliers.

    Cluster centers are ``separation``-scaled normal draws in subspace
    coordinates; samples add unit-variance spread in the subspace and
    ``noise_std`` noise in all of R^d.  Outliers are normal with standard
    deviation ``outlier_scale`` per coordinate.

    Returns
    -------
    inliers : Dataset
        ``k * n_per_cluster`` samples with integer labels as targets.
    outliers : Dataset
        ``n_outliers`` samples without targets.
    """
    d, k, n_per_cluster, n_outliers = int(d), int(k), int(n_per_cluster), int(n_outliers)
    r = k if r is None else int(r)
    if d < 1 or k < 1 or n_per_cluster < 1 or n_outliers < 0 or not 1 <= r <= d:
        raise DomainError("invalid cluster generator sizes")
    rng = np.random.default_rng(seed)
    basis, _ = np.linalg.qr(rng.standard_normal((d, r)))
    centers = separation * rng.standard_normal((k, r))
    labels = np.repeat(np.arange(k), n_per_cluster)
    coords = centers[labels] + rng.standard_normal((labels.size, r))
    X = coords @ basis.T + noise_std * rng.standard_normal((labels.size, d))
    outliers = outlier_scale * rng.standard_normal((n_outliers, d))
    return Dataset(X, labels[:, None]), Dataset(outliers.reshape(n_outliers, d))
