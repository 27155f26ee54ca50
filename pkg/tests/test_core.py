import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from kmpe.core import (
    WEIGHT_FLOOR,
    KernelParams,
    c_loss,
    check_bounds,
    check_convexity,
    check_hessian,
    check_l0_norm,
    check_large_sigma,
    check_lp_norm,
    check_small_p,
    check_symmetry,
    convexity_min_p,
    empirical_correntropy,
    empirical_kmpe,
    gaussian_kernel,
    kmpe_hessian_diag,
    kmpe_weight,
    run_property_suite,
)
from kmpe.errors import DomainError

# 50-digit mpmath evaluations, rounded to double
EXP_MINUS_2 = 0.13533528323661269189
WEIGHT_E1_S1_P3 = 0.38045930271582595732
CONVEXITY_P_AT_TWO_SIGMA = 11.583584148395975341
VEC = np.array([-2.135737554681947, 1.8955926871936657, -1.3059926069386285, -0.3887598524015964,
                -0.11301496051578146, -1.1113269781284136, -2.051689052674415, 0.9733392032895598,
                0.5415871695823424, -2.929294594518285])
KMPE_VEC_S12_P34 = 0.33545656904313406965
# second derivative of (1 - exp(-e^2 / 2 s^2))^(p/2) by mpmath.diff
HESSIAN_ORACLE = [
    (0.5, 1.0, 4.0, 0.54494457080548823605),
    (2.0, 1.0, 2.0, -0.40600584970983807568),
    (1.3, 0.7, 2.5, -0.97935320098045009656),
    (0.2, 1.5, 3.4, 0.06502752516679158702),
]

finite_errors = arrays(np.float64, st.integers(1, 12),
                       elements=st.floats(-20, 20, allow_nan=False, allow_infinity=False))
sigmas = st.floats(0.05, 50.0)
powers = st.floats(0.1, 12.0)


class TestKernelParams:
    def test_valid(self):
        k = KernelParams(2, 3)
        assert (k.sigma, k.p) == (2.0, 3.0)
        assert isinstance(k.sigma, float)

    @pytest.mark.parametrize("sigma,p", [(0, 2), (-1, 2), (1, 0), (1, -2), (math.inf, 2), (1, math.nan)])
    def test_rejects(self, sigma, p):
        with pytest.raises(DomainError):
            KernelParams(sigma, p)


class TestGaussianKernel:
    def test_identity(self):
        assert gaussian_kernel(0.0, 1.0) == 1.0

    def test_at_sigma(self):
        assert gaussian_kernel(2.0, 2.0) == pytest.approx(math.exp(-0.5), rel=1e-15)

    def test_scalar_oracle(self):
        assert gaussian_kernel(3.0, 1.5) == pytest.approx(EXP_MINUS_2, rel=1e-15)

    def test_vectorised(self):
        u = np.array([0.0, 1.0, -1.0])
        out = gaussian_kernel(u, 1.0)
        assert out.shape == (3,)
        assert out[1] == out[2]

    @pytest.mark.parametrize("u,sigma", [(math.nan, 1.0), (math.inf, 1.0), (1.0, 0.0), (1.0, -1.0)])
    def test_domain(self, u, sigma):
        with pytest.raises(DomainError):
            gaussian_kernel(u, sigma)

    @given(st.floats(-1e3, 1e3), sigmas)
    def test_range(self, u, sigma):
        v = gaussian_kernel(u, sigma)
        assert 0.0 <= v <= 1.0
        if u == 0.0:
            assert v == 1.0
        elif abs(u) > 1e-6 * sigma:
            assert v < 1.0


class TestEmpiricalKmpe:
    def test_zero_errors(self):
        assert empirical_kmpe(np.zeros(5), KernelParams(0.7, 3.1)) == 0.0

    def test_single_term(self):
        assert empirical_kmpe([1.3], KernelParams(1.3, 2.0)) == pytest.approx(1 - math.exp(-0.5), rel=1e-14)

    def test_high_precision_oracle(self):
        assert empirical_kmpe(VEC, KernelParams(1.2, 3.4)) == pytest.approx(KMPE_VEC_S12_P34, rel=1e-12)

    def test_naive_loop(self):
        rng = np.random.default_rng(3)
        e = rng.normal(size=10)
        s, p = 0.9, 1.7
        naive = sum((1 - math.exp(-x * x / (2 * s * s))) ** (p / 2) for x in e) / len(e)
        assert empirical_kmpe(e, KernelParams(s, p)) == pytest.approx(naive, rel=1e-13)

    @pytest.mark.parametrize("bad", [[], [np.nan], [1.0, np.inf]])
    def test_domain(self, bad):
        with pytest.raises(DomainError):
            empirical_kmpe(bad, KernelParams(1.0))

    @given(finite_errors, sigmas, powers)
    def test_bounds_property(self, e, sigma, p):
        v = empirical_kmpe(e, KernelParams(sigma, p))
        assert 0.0 <= v <= 1.0
        # the strict upper bound is representable only while some kernel value is not negligible
        if np.max(gaussian_kernel(e, sigma)) > 1e-6:
            assert v < 1.0
        if not np.any(e):
            assert v == 0.0

    @given(finite_errors, sigmas, powers)
    def test_symmetry_property(self, e, sigma, p):
        k = KernelParams(sigma, p)
        assert empirical_kmpe(e, k) == empirical_kmpe(-e, k)


class TestCorrentropy:
    def test_equal_inputs(self):
        x = np.arange(4.0)
        assert empirical_correntropy(x, x, 1.0) == 1.0
        assert c_loss(x, x, 1.0) == 0.0

    def test_two_term(self):
        assert empirical_correntropy([0, 1], [1, 0], 1.0) == pytest.approx(math.exp(-0.5), rel=1e-15)

    def test_c_loss_is_kmpe_at_p2(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            x, y = rng.normal(size=7), rng.normal(size=7)
            s = rng.uniform(0.2, 3.0)
            assert c_loss(x, y, s) == pytest.approx(empirical_kmpe(x - y, KernelParams(s, 2.0)), rel=1e-14)
            assert c_loss(x, y, s) == pytest.approx(1 - empirical_correntropy(x, y, s), abs=1e-15)

    def test_length_mismatch(self):
        with pytest.raises(DomainError):
            c_loss([1, 2], [1], 1.0)
        with pytest.raises(DomainError):
            empirical_correntropy([1, 2], [1], 1.0)


class TestWeight:
    def test_p2_at_zero(self):
        assert kmpe_weight(0.0, KernelParams(3.0, 2.0)) == 1.0

    def test_p4_at_zero(self):
        assert kmpe_weight(0.0, KernelParams(3.0, 4.0)) == 0.0

    def test_scalar_oracle(self):
        assert kmpe_weight(1.0, KernelParams(1.0, 3.0)) == pytest.approx(WEIGHT_E1_S1_P3, rel=1e-14)

    def test_p2_is_kernel(self):
        e = np.linspace(-4, 4, 17)
        np.testing.assert_array_equal(kmpe_weight(e, KernelParams(1.5, 2.0)), gaussian_kernel(e, 1.5))

    def test_floor_for_small_p(self):
        w = kmpe_weight(0.0, KernelParams(1.0, 1.0))
        assert w == pytest.approx(WEIGHT_FLOOR ** -0.5)
        assert math.isfinite(w)

    @given(st.floats(-50, 50), sigmas, st.floats(2.0, 12.0))
    def test_unit_interval_for_p_ge_2(self, e, sigma, p):
        w = kmpe_weight(e, KernelParams(sigma, p))
        assert 0.0 <= w <= 1.0

    @given(st.floats(-50, 50), sigmas, st.floats(0.05, 2.0))
    def test_finite_for_small_p(self, e, sigma, p):
        w = kmpe_weight(e, KernelParams(sigma, p))
        assert math.isfinite(w) and w >= 0.0


class TestHessian:
    @pytest.mark.parametrize("e,sigma,p,expected", HESSIAN_ORACLE)
    def test_high_precision_oracle(self, e, sigma, p, expected):
        assert kmpe_hessian_diag([e], KernelParams(sigma, p))[0] == pytest.approx(expected, rel=1e-10)

    def test_finite_difference_single(self):
        c = check_hessian(np.array([0.5]), KernelParams(1.0, 4.0))
        assert c.error < 1e-5

    def test_negative_outside_convex_region(self):
        assert kmpe_hessian_diag([2.0], KernelParams(1.0, 2.0))[0] < 0

    def test_scales_with_n(self):
        k = KernelParams(1.0, 3.0)
        one = kmpe_hessian_diag([0.7], k)[0]
        many = kmpe_hessian_diag([0.7, 0.1, 0.3], k)[0]
        assert many == pytest.approx(one / 3, rel=1e-14)

    @settings(max_examples=60)
    @given(arrays(np.float64, st.integers(1, 6), elements=st.floats(0.0, 1.0)), st.floats(0.3, 5.0),
           st.floats(2.0, 10.0))
    def test_convex_inside_sigma(self, frac, sigma, p):
        e = frac * sigma
        assert np.all(kmpe_hessian_diag(e, KernelParams(sigma, p)) >= -1e-15)

    @settings(max_examples=40)
    @given(arrays(np.float64, 4, elements=st.floats(0.1, 2.0)), st.sampled_from([2.0, 2.5, 4.0]))
    def test_matches_finite_differences(self, mags, p):
        assert check_hessian(mags, KernelParams(1.0, p)).error < 1e-5


class TestConvexityThreshold:
    def test_inside_region(self):
        assert convexity_min_p([0.3, -1.0, 0.9], 1.0) == 2.0

    @pytest.mark.parametrize("sigma", [0.5, 1.0, 3.0])
    def test_two_sigma_closed_form(self, sigma):
        assert convexity_min_p([2 * sigma], sigma) == pytest.approx(CONVEXITY_P_AT_TWO_SIGMA, rel=1e-13)
        assert CONVEXITY_P_AT_TWO_SIGMA == pytest.approx(1.5 * (math.exp(2) - 1) + 2, rel=1e-15)

    def test_underflow_is_infinite(self):
        assert convexity_min_p([100.0], 1.0) == math.inf

    @settings(max_examples=80)
    @given(arrays(np.float64, st.integers(1, 8), elements=st.floats(-5, 5)))
    def test_self_consistent(self, e):
        assert check_convexity(e, 1.0).error <= 1e-12


class TestPropertyChecks:
    def test_individual_checks(self):
        k = KernelParams(1.0, 3.0)
        e = np.array([0.4, -1.2, 2.0])
        assert check_symmetry(e, k).error == 0.0
        assert check_bounds(e, k).error == 0.0
        assert check_bounds(np.zeros(3), k).lhs == 0.0
        assert check_small_p(e, 1.0).error < 1e-6
        assert check_large_sigma(e, 3.0).error < 1e-3
        assert check_lp_norm(e, 3.0).error < 1e-3
        x = np.array([0.0, 0.7, -2.0, 0.0])
        c = check_l0_norm(x, 3.0)
        assert c.rhs == 2.0 and c.error < 1e-6

    def test_suite_passes_small(self):
        rows = run_property_suite(n_vectors=50, seed=5)
        assert len(rows) == 8
        assert all(r.passed for r in rows), rows
