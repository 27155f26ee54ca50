import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kmpe.core import KernelParams, gaussian_kernel
from kmpe.data import NoiseModel, gen_sinc
from kmpe.elm import (
    ElmModel,
    HiddenLayer,
    TrainConfig,
    classify,
    fit_kmpe_weights,
    hidden_matrix,
    init_hidden,
    kmpe_objective,
    kmpe_update,
    load_model,
    one_hot,
    predict,
    save_model,
    train_kmpe,
    train_ls,
    train_pinv,
)
from kmpe.errors import DivergenceError, DomainError, SingularSystemError


def sinc_problem(seed, background="uniform", L=90, activation="gaussian", scale=0.25):
    train, test = gen_sinc(200, 200, NoiseModel(background=background), seed)
    layer = init_hidden(1, L, activation, seed + 10_000, scale, 1.0)
    return layer, train, test


class TestHiddenLayer:
    def test_deterministic(self):
        a, b = init_hidden(3, 7, seed=42), init_hidden(3, 7, seed=42)
        np.testing.assert_array_equal(a.weights, b.weights)
        np.testing.assert_array_equal(a.biases, b.biases)

    def test_seed_changes_layer(self):
        assert not np.array_equal(init_hidden(3, 7, seed=1).weights, init_hidden(3, 7, seed=2).weights)

    def test_uniform_moments(self):
        layer = init_hidden(100, 1000, seed=0)
        w = layer.weights.ravel()
        assert w.size == 100_000
        assert abs(w.mean()) < 0.01
        assert w.min() >= -1 and w.max() <= 1

    def test_shapes(self):
        layer = init_hidden(4, 6)
        assert (layer.input_dim, layer.node_count) == (4, 6)
        assert layer.weights.shape == (6, 4) and layer.biases.shape == (6,)

    @pytest.mark.parametrize("kwargs", [dict(weights=np.ones((2, 2)), biases=np.ones(3)),
                                        dict(weights=np.ones(2), biases=np.ones(2)),
                                        dict(weights=np.full((1, 1), np.nan), biases=np.ones(1)),
                                        dict(weights=np.ones((1, 1)), biases=np.ones(1), activation="relu")])
    def test_invalid(self, kwargs):
        with pytest.raises(DomainError):
            HiddenLayer(**kwargs)

    def test_zero_parameters_sigmoid(self):
        layer = HiddenLayer(np.zeros((3, 2)), np.zeros(3))
        np.testing.assert_array_equal(hidden_matrix(layer, np.ones((4, 2))), 0.5)

    def test_scalar_oracle(self):
        layer = HiddenLayer([[0.3, -1.2]], [0.4])
        x = np.array([[2.0, 0.5]])
        z = 0.3 * 2.0 - 1.2 * 0.5 + 0.4
        assert hidden_matrix(layer, x)[0, 0] == pytest.approx(1 / (1 + math.exp(-z)), rel=1e-15)
        tanh = HiddenLayer([[0.3, -1.2]], [0.4], "tanh")
        assert hidden_matrix(tanh, x)[0, 0] == pytest.approx(math.tanh(z), rel=1e-15)
        gauss = HiddenLayer([[0.3, -1.2]], [0.4], "gaussian")
        assert hidden_matrix(gauss, x)[0, 0] == pytest.approx(math.exp(-z * z), rel=1e-15)

    def test_sigmoid_range(self):
        layer = init_hidden(2, 20, seed=3)
        H = hidden_matrix(layer, np.random.default_rng(0).normal(size=(50, 2)))
        assert np.all((H > 0) & (H < 1))

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            hidden_matrix(init_hidden(3, 4), np.ones((5, 2)))


class TestLeastSquares:
    def test_identity(self):
        t = np.array([0.5, -1.0, 2.0])
        np.testing.assert_allclose(train_ls(np.eye(3), t), t)

    def test_ridge_shrinkage(self):
        rng = np.random.default_rng(0)
        H, T = rng.normal(size=(40, 8)), rng.normal(size=40)
        norms = [np.linalg.norm(train_ls(H, T, lam)) for lam in (1.0, 10.0, 100.0)]
        assert norms[0] > norms[1] > norms[2]

    def test_normal_equation_oracle(self):
        rng = np.random.default_rng(1)
        H, T = rng.normal(size=(50, 10)), rng.normal(size=50)
        oracle = np.linalg.inv(H.T @ H) @ H.T @ T
        np.testing.assert_allclose(train_ls(H, T), oracle, rtol=1e-8, atol=1e-12)

    def test_singular(self):
        with pytest.raises(SingularSystemError):
            train_ls(np.ones((6, 2)), np.ones(6))

    def test_pinv_handles_rank_deficiency(self):
        H = np.hstack([np.ones((6, 1)), np.ones((6, 1))])
        beta = train_pinv(H, np.full(6, 2.0))
        np.testing.assert_allclose(beta, [1.0, 1.0])

    def test_interpolation(self):
        layer = init_hidden(8, 8, seed=5, weight_scale=3.0)
        X = np.random.default_rng(5).normal(size=(8, 8))
        T = np.sin(3 * X[:, 0])
        beta = train_ls(hidden_matrix(layer, X), T)
        np.testing.assert_allclose(predict(layer, beta, X), T, atol=1e-6)


class TestPredict:
    def test_zero_beta(self):
        layer = init_hidden(2, 5)
        np.testing.assert_array_equal(predict(layer, np.zeros((5, 3)), np.ones((4, 2))), 0.0)

    def test_classify_ties_lowest(self):
        layer = HiddenLayer(np.zeros((1, 1)), np.zeros(1))
        beta = np.array([[1.0, 1.0, 0.5]])
        np.testing.assert_array_equal(classify(layer, beta, np.zeros((3, 1))), [0, 0, 0])

    def test_one_hot_exact_fit(self):
        layer = init_hidden(9, 12, seed=1, weight_scale=3.0)
        rng = np.random.default_rng(2)
        X = rng.normal(size=(9, 9))
        labels = np.arange(9) % 3
        beta = train_pinv(hidden_matrix(layer, X), one_hot(labels))
        np.testing.assert_array_equal(classify(layer, beta, X), labels)

    def test_one_hot(self):
        np.testing.assert_array_equal(one_hot([2, 0], 4), [[0, 0, 1, 0], [1, 0, 0, 0]])
        with pytest.raises(DomainError):
            one_hot([-1])

    def test_beta_mismatch(self):
        with pytest.raises(DomainError):
            predict(init_hidden(1, 4), np.zeros(3), np.ones(2))


class TestTrainConfig:
    @pytest.mark.parametrize("kw", [dict(max_iter=0), dict(tol=0.0), dict(lambda_prime=-1.0)])
    def test_invalid(self, kw):
        with pytest.raises(DomainError):
            TrainConfig(KernelParams(1.0), **kw)


class TestKmpeTraining:
    def test_reduces_to_least_squares(self):
        layer = init_hidden(4, 10, seed=7, weight_scale=2.0)
        X = np.random.default_rng(7).normal(size=(80, 4))
        T = np.cos(X[:, 0]) + X[:, 1]
        H = hidden_matrix(layer, X)
        ls = train_ls(H, T)
        scale = np.max(np.abs(T - H @ ls)) + np.max(np.abs(T))
        beta, trace = train_kmpe(layer, X, T, TrainConfig(KernelParams(1e6 * scale, 2.0)))
        assert trace.converged
        assert np.linalg.norm(beta - ls) < 1e-5

    def test_p2_weights_are_kernel(self):
        rng = np.random.default_rng(0)
        H, T = rng.normal(size=(30, 4)), rng.normal(size=30)
        beta = rng.normal(size=4)
        cfg = TrainConfig(KernelParams(0.8, 2.0), 0.01)
        lam = gaussian_kernel(T - H @ beta, 0.8)
        oracle = np.linalg.solve(H.T @ (lam[:, None] * H) + 0.01 * np.eye(4), H.T @ (lam * T))
        np.testing.assert_allclose(kmpe_update(H, T, beta, cfg), oracle, rtol=1e-10)

    def test_objective_penalty(self):
        H = np.eye(2)
        T = np.zeros(2)
        beta = np.array([1.0, 0.0])
        cfg = TrainConfig(KernelParams(1.0, 2.0), lambda_prime=4.0)
        data = 0.5 * (1 - math.exp(-0.5))
        assert kmpe_objective(H, T, beta, cfg) == pytest.approx(data + 2 / (4 * 2) * 4.0, rel=1e-14)

    def test_fixed_point_on_converged_run(self):
        layer, train, _ = sinc_problem(3)
        cfg = TrainConfig(KernelParams(0.8, 4.0), 2e-6)
        beta, trace = train_kmpe(layer, train.X, train.targets, cfg)
        assert trace.converged and beta.shape == (90, 1)
        assert len(trace.losses) == trace.iterations <= cfg.max_iter
        # the loss trace never rises with the step safeguard
        losses = [trace.initial_loss] + trace.losses
        assert all(b <= a for a, b in zip(losses, losses[1:]))

    def test_literal_iteration_can_rise_for_large_p(self):
        # Without the safeguard the plain fixed-point map overshoots on this problem.
        layer, train, _ = sinc_problem(0)
        H = hidden_matrix(layer, train.X)
        cfg = TrainConfig(KernelParams(0.8, 4.0), 2e-6, backtrack=False)
        _, trace = fit_kmpe_weights(H, train.targets[:, 0], cfg)
        losses = [trace.initial_loss] + trace.losses
        assert any(b > a for a, b in zip(losses, losses[1:]))

    @staticmethod
    def contaminated_problem(seed):
        rng = np.random.default_rng(seed)
        H = rng.normal(size=(60, 5))
        noise = np.where(rng.random(60) < 0.1, rng.normal(0, 5, 60), 0.1 * rng.normal(size=60))
        return H, H @ rng.normal(size=5) + noise

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 1000), st.sampled_from([1.0, 1.5, 2.0]))
    def test_descent_small_p_without_safeguard(self, seed, p):
        H, T = self.contaminated_problem(seed)
        cfg = TrainConfig(KernelParams(1.0, p), 1e-3, backtrack=False)
        _, trace = fit_kmpe_weights(H, T, cfg)
        losses = [trace.initial_loss] + trace.losses
        assert all(b <= a + 1e-10 for a, b in zip(losses, losses[1:]))
        assert all(eta == 1.0 for eta in trace.step_sizes)

    def test_tight_tolerance_rises_for_p_below_2_are_roundoff_sized(self):
        # Iterated far past the default tolerance, p = 1 drives some residuals to
        # ~1e-7; the weight there is either floored or huge, and descent holds only
        # up to a few ulps of the loss.
        cfg = TrainConfig(KernelParams(1.0, 1.0), 1e-3, max_iter=50, tol=1e-12, backtrack=False)
        rises = []
        for seed in (55, 198):
            H, T = self.contaminated_problem(seed)
            beta, trace = fit_kmpe_weights(H, T, cfg)
            rises.append(float(np.max(np.diff([trace.initial_loss] + trace.losses))))
            assert np.min(np.abs(T - H @ beta)) < 1e-6
        assert max(rises) > 0.0
        assert max(rises) < 1e-8

    def test_deterministic(self):
        layer, train, _ = sinc_problem(1, "sine", 25)
        cfg = TrainConfig(KernelParams(1.2, 3.4), 2.5e-6)
        b1, _ = train_kmpe(layer, train.X, train.targets, cfg)
        b2, _ = train_kmpe(layer, train.X, train.targets, cfg)
        np.testing.assert_array_equal(b1, b2)

    def test_multi_output_uses_row_norm(self):
        rng = np.random.default_rng(4)
        H = rng.normal(size=(20, 3))
        T = rng.normal(size=(20, 2))
        beta = rng.normal(size=(3, 2))
        cfg = TrainConfig(KernelParams(1.0, 3.0), 0.1)
        r = np.linalg.norm(T - H @ beta, axis=1)
        lam = (1 - np.exp(-r ** 2 / 2)) ** 0.5 * np.exp(-r ** 2 / 2)
        oracle = np.linalg.solve(H.T @ (lam[:, None] * H) + 0.1 * np.eye(3), H.T @ (lam[:, None] * T))
        np.testing.assert_allclose(kmpe_update(H, T, beta, cfg), oracle, rtol=1e-10)

    def test_divergence_error_carries_iteration(self):
        H = np.eye(3)
        T = np.array([1.0, np.nan, 0.0])
        with pytest.raises(DivergenceError) as info:
            fit_kmpe_weights(H, T, TrainConfig(KernelParams(1.0)))
        assert info.value.iteration == 0

    def test_row_mismatch(self):
        with pytest.raises(DomainError):
            fit_kmpe_weights(np.eye(3), np.ones(4), TrainConfig(KernelParams(1.0)))

    @pytest.mark.parametrize("background,L,sigma,p,lp", [("uniform", 90, 0.8, 4.0, 2e-6),
                                                         ("sine", 25, 1.2, 3.4, 2.5e-6)])
    def test_convergence_rate_large_p(self, background, L, sigma, p, lp):
        converged = 0
        for seed in range(100):
            layer, train, _ = sinc_problem(seed, background, L)
            _, trace = train_kmpe(layer, train.X, train.targets, TrainConfig(KernelParams(sigma, p), lp))
            converged += trace.converged
        assert converged >= 95


class TestPersistence:
    def test_round_trip(self, tmp_path):
        layer = init_hidden(3, 5, "tanh", seed=123456789012)
        beta = np.random.default_rng(0).normal(size=(5, 2))
        path = tmp_path / "model.npz"
        save_model(path, ElmModel(layer, beta, KernelParams(0.8, 4.0)))
        back = load_model(path)
        np.testing.assert_array_equal(back.layer.weights, layer.weights)
        np.testing.assert_array_equal(back.layer.biases, layer.biases)
        np.testing.assert_array_equal(back.beta, beta)
        assert back.layer.activation == "tanh" and back.layer.seed == 123456789012
        assert back.kernel == KernelParams(0.8, 4.0)

    def test_rejects_other_files(self, tmp_path):
        path = tmp_path / "x.npz"
        np.savez(path, meta=np.array('{"format": "other"}'))
        with pytest.raises(DomainError):
            load_model(path)
