"""
Extreme learning machine: a single hidden layer with random, fixed nodes and
trained output weights.

Three trainers share the same hidden layer:

* :func:`train_ls` -- ridge / least-squares closed form (ELM, RELM);
* :func:`train_pinv` -- minimum-norm pseudo-inverse solution (plain ELM on a
  rank-deficient hidden matrix);
* :func:`train_kmpe` -- fixed-point iteration on the KMPE loss.  With
  ``p = 2`` this is the correntropy-criterion ELM.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .core import KernelParams, kmpe_weight
from .errors import DivergenceError, DomainError
from .numlin import solve_regularized_weighted

ACTIVATIONS = {
    "sigmoid": expit,
    "tanh": np.tanh,
    "gaussian": lambda z: np.exp(-z * z),
}


@dataclass(frozen=True)
class HiddenLayer:
    """Random hidden nodes ``f(w_j . x + b_j)``; ``weights`` has shape (L, d)."""

    weights: np.ndarray
    biases: np.ndarray
    activation: str = "sigmoid"
    seed: int = 0

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        b = np.asarray(self.biases, dtype=float).ravel()
        if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 1:
            raise DomainError("weights must be an (L, d) matrix with L, d >= 1")
        if b.size != w.shape[0]:
            raise DomainError("need one bias per hidden node")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise DomainError("hidden parameters must be finite")
        if self.activation not in ACTIVATIONS:
            raise DomainError(f"unknown activation {self.activation!r}")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "biases", b)

    @property
    def input_dim(self):
        return self.weights.shape[1]

    @property
    def node_count(self):
        return self.weights.shape[0]


def init_hidden(d, L, activation="sigmoid", seed=0, weight_scale=1.0, bias_scale=1.0):
    """
    Draw a hidden layer with i.i.d. uniform parameters.

    Input weights are uniform on ``[-weight_scale, weight_scale]`` and biases
    on ``[-bias_scale, bias_scale]`` (both ``[-1, 1]`` by default), from a
    PCG64 generator seeded with ``seed``.  Weights are drawn first, row-major,
    then biases.
    """
    d, L = int(d), int(L)
    if d < 1 or L < 1:
        raise DomainError("d and L must be >= 1")
    rng = np.random.default_rng(seed)
    weights = rng.uniform(-weight_scale, weight_scale, size=(L, d))
    biases = rng.uniform(-bias_scale, bias_scale, size=L)
    return HiddenLayer(weights, biases, activation, int(seed))


def _inputs(layer, X):
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1) if layer.input_dim == 1 else X.reshape(1, -1)
    if X.ndim != 2 or X.shape[1] != layer.input_dim:
        raise DomainError(f"expected inputs with {layer.input_dim} columns, got shape {X.shape}")
    return X


def hidden_matrix(layer: HiddenLayer, X) -> np.ndarray:
    """Hidden-layer output matrix of shape (N, L)."""
    X = _inputs(layer, X)
    return ACTIVATIONS[layer.activation](X @ layer.weights.T + layer.biases)


def train_ls(H, T, lam=0.0) -> np.ndarray:
    """Closed-form ``(H^T H + lam I)^{-1} H^T T``; raises on singular ``H^T H`` when ``lam == 0``."""
    H = np.asarray(H, dtype=float)
    return solve_regularized_weighted(H, np.ones(H.shape[0]), T, lam)


def train_pinv(H, T) -> np.ndarray:
    """Minimum-norm least-squares output weights ``pinv(H) T``."""
    beta, *_ = np.linalg.lstsq(np.asarray(H, dtype=float), np.asarray(T, dtype=float), rcond=None)
    return beta


@dataclass(frozen=True)
class TrainConfig:
    """
    Settings of the KMPE fixed-point trainer.

    ``lambda_prime`` is the ridge term inside the update
    ``beta = (H^T L H + lambda_prime I)^{-1} H^T L T``.  The matching penalty
    weight on ``||beta||^2`` in the loss is ``p lambda_prime / (4 sigma^2 N)``.

    With ``backtrack`` enabled (default), an update that would raise the loss
    is shortened by repeated halving along the same direction.  Full steps
    are always tried first.
    """

    kernel: KernelParams
    lambda_prime: float = 0.0
    max_iter: int = 100
    tol: float = 1e-6
    backtrack: bool = True

    def __post_init__(self):
        if int(self.max_iter) < 1:
            raise DomainError("max_iter must be >= 1")
        if not (self.tol > 0):
            raise DomainError("tol must be positive")
        if not (self.lambda_prime >= 0 and math.isfinite(self.lambda_prime)):
            raise DomainError("lambda_prime must be nonnegative")


@dataclass
class TrainTrace:
    losses: list = field(default_factory=list)
    step_sizes: list = field(default_factory=list)
    initial_loss: float = math.nan
    iterations: int = 0
    converged: bool = False
    fixed_point_residual: float = math.nan


def _residual_norms(T, Y):
    E = T - Y
    return np.abs(E) if E.ndim == 1 else np.sqrt(np.sum(E * E, axis=1))


def kmpe_objective(H, T, beta, cfg: TrainConfig) -> float:
    """Regularised KMPE loss of output weights ``beta``."""
    k = cfg.kernel
    r = _residual_norms(T, H @ beta)
    data = np.mean((-np.expm1(-r * r / (2.0 * k.sigma ** 2))) ** (k.p / 2.0))
    penalty = k.p / (4.0 * k.sigma ** 2 * H.shape[0]) * cfg.lambda_prime * float(np.sum(beta * beta))
    return float(data + penalty)


def kmpe_update(H, T, beta, cfg: TrainConfig) -> np.ndarray:
    """One application of the fixed-point map at ``beta``."""
    r = _residual_norms(T, H @ beta)
    return solve_regularized_weighted(H, kmpe_weight(r, cfg.kernel), T, cfg.lambda_prime)


def fit_kmpe_weights(H, T, cfg: TrainConfig, beta0=None):
    """
    Fixed-point KMPE training on a precomputed hidden matrix.

    Starts from ``beta0`` (zeros by default) and stops when the loss changes
    by less than ``cfg.tol`` or after ``cfg.max_iter`` updates.  Multi-column
    targets enter the kernel through the row-wise Euclidean residual.

    Returns
    -------
    beta, TrainTrace
    """
    H = np.asarray(H, dtype=float)
    T = np.asarray(T, dtype=float)
    if T.shape[0] != H.shape[0]:
        raise DomainError("H and T must have the same number of rows")
    shape = (H.shape[1],) + T.shape[1:]
    beta = np.zeros(shape) if beta0 is None else np.array(beta0, dtype=float).reshape(shape)

    trace = TrainTrace()
    loss = kmpe_objective(H, T, beta, cfg)
    if not math.isfinite(loss):
        raise DivergenceError(0)
    trace.initial_loss = loss
    for k in range(1, int(cfg.max_iter) + 1):
        candidate = kmpe_update(H, T, beta, cfg)
        new_loss = kmpe_objective(H, T, candidate, cfg)
        eta = 1.0
        if cfg.backtrack and not new_loss <= loss:
            direction = candidate - beta
            while not new_loss <= loss and eta > 2.0 ** -30:
                eta *= 0.5
                candidate = beta + eta * direction
                new_loss = kmpe_objective(H, T, candidate, cfg)
            if not new_loss <= loss:
                # no decrease along the update direction: stationary to rounding
                eta, candidate, new_loss = 0.0, beta, loss
        if not math.isfinite(new_loss):
            raise DivergenceError(k)
        trace.losses.append(new_loss)
        trace.step_sizes.append(eta)
        trace.iterations = k
        delta = abs(new_loss - loss)
        beta, loss = candidate, new_loss
        if delta < cfg.tol:
            trace.converged = True
            break
    trace.fixed_point_residual = float(np.max(np.abs(kmpe_update(H, T, beta, cfg) - beta)))
    return beta, trace


def train_kmpe(layer: HiddenLayer, X, T, cfg: TrainConfig):
    """Train output weights of ``layer`` on ``(X, T)`` under the KMPE loss."""
    H = hidden_matrix(layer, X)
    T = np.asarray(T, dtype=float)
    if T.ndim == 2 and T.shape[1] == 1:
        beta, trace = fit_kmpe_weights(H, T[:, 0], cfg)
        return beta[:, None], trace
    return fit_kmpe_weights(H, T, cfg)


def predict(layer: HiddenLayer, beta, X) -> np.ndarray:
    """Network outputs ``H(X) beta``."""
    beta = np.asarray(beta, dtype=float)
    H = hidden_matrix(layer, X)
    if beta.shape[0] != H.shape[1]:
        raise DomainError(f"beta has {beta.shape[0]} rows, layer has {H.shape[1]} nodes")
    return H @ beta


def classify(layer: HiddenLayer, beta, X) -> np.ndarray:
    """Row-wise argmax of :func:`predict`; ties go to the lowest index."""
    Y = predict(layer, beta, X)
    if Y.ndim == 1:
        Y = Y[:, None]
    return np.argmax(Y, axis=1)


def one_hot(labels, n_classes=None) -> np.ndarray:
    labels = np.asarray(labels, dtype=int).ravel()
    if labels.size and labels.min() < 0:
        raise DomainError("labels must be nonnegative")
    k = int(labels.max()) + 1 if n_classes is None else int(n_classes)
    out = np.zeros((labels.size, k))
    out[np.arange(labels.size), labels] = 1.0
    return out


@dataclass(frozen=True)
class ElmModel:
    layer: HiddenLayer
    beta: np.ndarray
    kernel: KernelParams | None = None


def save_model(path, model: ElmModel):
    """Write a model to an ``.npz`` archive; arrays are stored bit-exactly."""
    meta = {
        "format": "kmpe-elm",
        "version": 1,
        "d": model.layer.input_dim,
        "L": model.layer.node_count,
        "activation": model.layer.activation,
        "seed": int(model.layer.seed),
        "sigma": None if model.kernel is None else model.kernel.sigma,
        "p": None if model.kernel is None else model.kernel.p,
    }
    with open(path, "wb") as fh:
        np.savez(fh, meta=np.array(json.dumps(meta)), weights=model.layer.weights,
                 biases=model.layer.biases, beta=np.asarray(model.beta, dtype=float))


def load_model(path) -> ElmModel:
    with np.load(path, allow_pickle=False) as z:
        meta = json.loads(str(z["meta"]))
        if meta.get("format") != "kmpe-elm":
            raise DomainError(f"{path}: not an ELM model file")
        layer = HiddenLayer(z["weights"], z["biases"], meta["activation"], meta["seed"])
        beta = z["beta"]
    kernel = None if meta["sigma"] is None else KernelParams(meta["sigma"], meta["p"])
    return ElmModel(layer, beta, kernel)
