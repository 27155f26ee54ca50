"""
Kernel mean p-power error (KMPE) and related correntropy quantities.

All functions operate on error values e = x - y with a Gaussian kernel
``exp(-e**2 / (2 sigma**2))``.  Vector inputs are handled elementwise with
numpy; scalar inputs return Python floats.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DomainError

#: Floor applied to ``1 - kappa`` before it is raised to a negative power.
WEIGHT_FLOOR = 1e-12


@dataclass(frozen=True)
class KernelParams:
    """Kernel bandwidth ``sigma`` and power ``p`` of the KMPE loss."""

    sigma: float
    p: float = 2.0

    def __post_init__(self):
        sigma, p = float(self.sigma), float(self.p)
        if not (math.isfinite(sigma) and sigma > 0):
            raise DomainError(f"sigma must be positive and finite, got {self.sigma!r}")
        if not (math.isfinite(p) and p > 0):
            raise DomainError(f"p must be positive and finite, got {self.p!r}")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "p", p)


def _errors(e) -> np.ndarray:
    e = np.asarray(e, dtype=float)
    if e.ndim == 0:
        e = e.reshape(1)
    if e.size == 0:
        raise DomainError("error vector must be non-empty")
    if not np.all(np.isfinite(e)):
        raise DomainError("error vector contains non-finite entries")
    return e


def _check_sigma(sigma):
    sigma = float(sigma)
    if not (math.isfinite(sigma) and sigma > 0):
        raise DomainError(f"sigma must be positive and finite, got {sigma!r}")
    return sigma


def gaussian_kernel(u, sigma):
    """Gaussian kernel ``exp(-u^2 / (2 sigma^2))``, elementwise for arrays."""
    sigma = _check_sigma(sigma)
    arr = np.asarray(u, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("kernel argument must be finite")
    out = np.exp(-arr * arr / (2.0 * sigma * sigma))
    return float(out) if out.ndim == 0 else out


def _one_minus_kappa(e, sigma):
    # 1 - exp(-x) without cancellation for small x
    return -np.expm1(-e * e / (2.0 * sigma * sigma))


def empirical_kmpe(e, params: KernelParams) -> float:
    """Sample KMPE: ``mean((1 - kappa(e_i))**(p/2))``."""
    e = _errors(e)
    return float(np.mean(_one_minus_kappa(e, params.sigma) ** (params.p / 2.0)))


def empirical_correntropy(x, y, sigma) -> float:
    """Sample correntropy ``mean(kappa(x_i - y_i))``."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise DomainError(f"length mismatch: {x.size} vs {y.size}")
    return float(np.mean(gaussian_kernel(_errors(x - y), sigma)))


def c_loss(x, y, sigma) -> float:
    """Correntropic loss, ``1 - correntropy``."""
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise DomainError(f"length mismatch: {x.size} vs {y.size}")
    e = _errors(x - y)
    return float(np.mean(_one_minus_kappa(e, _check_sigma(sigma))))


def kmpe_weight(e, params: KernelParams):
    """
    Per-sample reweighting factor ``(1 - kappa)**((p-2)/2) * kappa``.

    This is the diagonal of the weighting matrix in the fixed-point and IRLS
    updates.  For ``p < 2`` the base ``1 - kappa`` is floored at
    :data:`WEIGHT_FLOOR` so that exact fits do not produce infinite weights.
    """
    arr = np.asarray(e, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("error values must be finite")
    s2 = 2.0 * params.sigma ** 2
    kappa = np.exp(-arr * arr / s2)
    base = -np.expm1(-arr * arr / s2)
    if params.p < 2:
        base = np.maximum(base, WEIGHT_FLOOR)
    out = base ** ((params.p - 2.0) / 2.0) * kappa
    return float(out) if out.ndim == 0 else out


def kmpe_hessian_diag(e, params: KernelParams) -> np.ndarray:
    """
    Diagonal of the Hessian of :func:`empirical_kmpe` with respect to ``e``.

    The Hessian is diagonal because every term depends on a single e_i.
    For ``p < 4`` the factor ``(1 - kappa)**((p-4)/2)`` is evaluated with the
    same floor as :func:`kmpe_weight`.
    """
    e = _errors(e)
    sigma, p = params.sigma, params.p
    n = e.size
    e2 = e * e
    kappa = np.exp(-e2 / (2.0 * sigma ** 2))
    omk = _one_minus_kappa(e, sigma)
    base = np.maximum(omk, WEIGHT_FLOOR) if p < 4 else omk
    bracket = (p - 2.0) * e2 * kappa - 2.0 * e2 * omk + 2.0 * sigma ** 2 * omk
    return p / (4.0 * n * sigma ** 4) * base ** ((p - 4.0) / 2.0) * kappa * bracket


def convexity_min_p(e, sigma) -> float:
    """
    Smallest power p >= 2 for which the empirical KMPE is convex at ``e``.

    Returns 2 when every ``|e_i| <= sigma``.  Returns ``inf`` if some error is
    so large that its kernel value underflows to zero.
    """
    e = _errors(e)
    sigma = _check_sigma(sigma)
    big = e[np.abs(e) > sigma]
    if big.size == 0:
        return 2.0
    e2 = big * big
    kappa = np.exp(-e2 / (2.0 * sigma ** 2))
    if np.any(kappa == 0.0):
        return math.inf
    omk = _one_minus_kappa(big, sigma)
    return float(np.max(2.0 * (e2 - sigma ** 2) * omk / (e2 * kappa)) + 2.0)


# ---------------------------------------------------------------------------
# Executable property checks.  Each returns (lhs, rhs, error) where ``error``
# is the quantity compared against the property's tolerance.


class Check(NamedTuple):
    lhs: float
    rhs: float
    error: float


def _rel(a, b):
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def check_symmetry(e, params: KernelParams) -> Check:
    """KMPE of ``e`` against KMPE of ``-e``; error is relative."""
    e = _errors(e)
    a, b = empirical_kmpe(e, params), empirical_kmpe(-e, params)
    return Check(a, b, _rel(a, b))


def check_bounds(e, params: KernelParams) -> Check:
    """
    Distance of the KMPE value from the admissible set.

    ``rhs`` is 0 for an all-zero vector and otherwise the value clipped to
    ``(0, 1)``; ``error`` is how far ``lhs`` lies outside.
    """
    e = _errors(e)
    v = empirical_kmpe(e, params)
    if not np.any(e):
        target = 0.0
    else:
        target = min(max(v, math.ulp(0.0)), math.nextafter(1.0, 0.0))
    return Check(v, target, abs(v - target))


def check_small_p(e, sigma, p=1e-4) -> Check:
    """Small-power logarithmic approximation; error is absolute."""
    e = _errors(e)
    params = KernelParams(sigma, p)
    lhs = empirical_kmpe(e, params)
    rhs = 1.0 + p / 2.0 * float(np.mean(np.log(_one_minus_kappa(e, params.sigma))))
    return Check(lhs, rhs, abs(lhs - rhs))


def check_large_sigma(e, p, factor=100.0) -> Check:
    """Mean p-power error limit at ``sigma = factor * max|e|``; relative error."""
    e = _errors(e)
    sigma = factor * float(np.max(np.abs(e)))
    lhs = empirical_kmpe(e, KernelParams(sigma, p))
    rhs = (2.0 * sigma ** 2) ** (-p / 2.0) * float(np.mean(np.abs(e) ** p))
    return Check(lhs, rhs, _rel(lhs, rhs))


def check_lp_norm(x, p, factor=1000.0) -> Check:
    """Scaled KMPE of ``x - 0`` against ``sum |x_i|^p``; relative error."""
    x = _errors(x)
    sigma = factor * float(np.max(np.abs(x)))
    n = x.size
    lhs = n * (math.sqrt(2.0) * sigma) ** p * empirical_kmpe(x, KernelParams(sigma, p))
    rhs = float(np.sum(np.abs(x) ** p))
    return Check(lhs, rhs, _rel(lhs, rhs))


def check_l0_norm(x, p, sigma=1e-3) -> Check:
    """``N * KMPE(x - 0)`` at tiny bandwidth against the nonzero count."""
    x = _errors(x)
    lhs = x.size * empirical_kmpe(x, KernelParams(sigma, p))
    rhs = float(np.count_nonzero(x))
    return Check(lhs, rhs, abs(lhs - rhs))


def check_hessian(e, params: KernelParams, step=1e-4) -> Check:
    """
    Analytic Hessian diagonal against central second differences.

    ``lhs``/``rhs`` are the entries with the largest discrepancy; ``error`` is
    the max absolute difference.
    """
    e = _errors(e)
    analytic = kmpe_hessian_diag(e, params)
    numeric = np.empty_like(analytic)
    f0 = empirical_kmpe(e, params)
    for i in range(e.size):
        ep, em = e.copy(), e.copy()
        ep[i] += step
        em[i] -= step
        numeric[i] = (empirical_kmpe(ep, params) - 2.0 * f0 + empirical_kmpe(em, params)) / step ** 2
    diff = np.abs(analytic - numeric)
    j = int(np.argmax(diff))
    return Check(float(analytic[j]), float(numeric[j]), float(diff[j]))


def check_convexity(e, sigma) -> Check:
    """Hessian diagonal at the power returned by :func:`convexity_min_p`.

    ``error`` is the size of the most negative entry (0 when all are >= 0).
    """
    e = _errors(e)
    p_star = convexity_min_p(e, sigma)
    xi = kmpe_hessian_diag(e, KernelParams(sigma, p_star))
    lo = float(np.min(xi))
    return Check(lo, 0.0, max(0.0, -lo))


class PropertyResult(NamedTuple):
    name: str
    checks: int
    max_error: float
    tolerance: float
    passed: bool


def run_property_suite(n_vectors=1000, seed=0, length=10) -> list[PropertyResult]:
    """
    Evaluate every KMPE property check on random error vectors.

    The same routine backs the ``props`` command-line task and the test
    suite.  Vectors are drawn from a seeded PCG64 generator.
    """
    rng = np.random.default_rng(seed)
    rows = []

    def record(name, errors, tol):
        worst = float(np.max(errors))
        rows.append(PropertyResult(name, len(errors), worst, tol, bool(worst <= tol)))

    sym, bnd, small, large, lp, l0, hess, conv = ([] for _ in range(8))
    for k in range(n_vectors):
        sigma = rng.uniform(0.3, 3.0)
        p = rng.uniform(0.5, 6.0)
        e = rng.normal(0.0, 2.0, length)
        if k % 50 == 0:
            e = np.zeros(length)
        params = KernelParams(sigma, p)
        sym.append(check_symmetry(e, params).error)
        bnd.append(check_bounds(e, params).error)

        # bounded away from zero
        e_nz = rng.choice([-1.0, 1.0], length) * rng.uniform(0.1 * sigma, 3.0 * sigma, length)
        small.append(check_small_p(e_nz, sigma).error)
        large.append(check_large_sigma(e_nz, p).error)
        lp.append(check_lp_norm(e_nz, p).error)

        x = rng.choice([-1.0, 1.0], length) * rng.uniform(0.5 + 1e-9, 5.0, length)
        x[rng.random(length) < 0.4] = 0.0
        l0.append(check_l0_norm(x, p).error)

        hp = KernelParams(1.0, (2.0, 2.5, 4.0)[k % 3])
        eh = rng.choice([-1.0, 1.0], length) * rng.uniform(0.1, 2.0, length)
        hess.append(check_hessian(eh, hp).error)
        ec = rng.normal(0.0, 1.5, length)
        conv.append(check_convexity(ec, 1.0).error)

    record("P1 symmetry", sym, 1e-15)
    record("P2 bounds", bnd, 0.0)
    record("P3 small-p limit", small, 1e-6)
    record("P4 large-sigma MPE limit", large, 1e-3)
    record("P5 Hessian vs finite differences", hess, 1e-5)
    record("P6 convexity threshold", conv, 1e-12)
    record("P7 Lp-norm limit", lp, 1e-3)
    record("P8 L0-norm limit", l0, 1e-6)
    return rows
