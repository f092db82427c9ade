"""Finite-sample learner tests: optimizer certificates, determinism, and
closed-form cross-checks."""

import numpy as np
import pytest

from propdp.erm import (
    GRADIENT_TOL_SCALE,
    Dataset,
    fit_objective_perturbation,
    fit_output_perturbation,
    run_noisy_gd,
)
from propdp.errors import ConfigError
from propdp.laws import ScalarLaw
from propdp.losses import HuberCeLoss, HuberLoss, LogisticCeLoss, LogisticLoss
from propdp.rng import box_muller, stream


def make_regression(seed=0, n=60, d=20, noise=0.2):
    gen = stream(seed, "erm-test-data")
    X = box_muller(gen, (n, d)) / np.sqrt(d)
    radius = float(np.linalg.norm(X, axis=1).max()) + 1e-9
    beta_star = box_muller(gen, d)
    y = X @ beta_star + noise * box_muller(gen, n)
    return Dataset(X, y, radius), beta_star


def make_classification(seed=0, n=60, d=20):
    gen = stream(seed, "erm-test-clf")
    X = box_muller(gen, (n, d)) / np.sqrt(d)
    radius = float(np.linalg.norm(X, axis=1).max()) + 1e-9
    beta_star = box_muller(gen, d)
    p = 1.0 / (1.0 + np.exp(-(X @ beta_star)))
    y = (gen.random(n) < p).astype(float)
    return Dataset(X, y, radius), beta_star


class TestDataset:
    def test_properties(self):
        data, _ = make_regression()
        assert data.n == 60
        assert data.d == 20

    def test_shape_mismatch(self):
        with pytest.raises(ConfigError):
            Dataset(np.zeros((3, 2)), np.zeros(4), 1.0)

    def test_non_finite(self):
        X = np.zeros((2, 2))
        with pytest.raises(ConfigError):
            Dataset(X, np.array([np.nan, 0.0]), 1.0)

    def test_radius_enforced(self):
        X = np.eye(3) * 2.0
        with pytest.raises(ConfigError):
            Dataset(X, np.zeros(3), 1.0)
        Dataset(X, np.zeros(3), 2.0)  # exact bound passes


class TestObjectivePerturbation:
    def test_certificate(self):
        data, _ = make_regression()
        res = fit_objective_perturbation(data, HuberLoss(1.0), lam=0.7, nu=0.3, seed=5)
        assert res.grad_norm <= GRADIENT_TOL_SCALE * max(1.0, data.n)

    def test_stationarity_recomputed(self):
        data, _ = make_regression()
        loss = LogisticLoss()
        data_c, _ = make_classification()
        res = fit_objective_perturbation(data_c, loss, lam=0.5, nu=0.2, seed=9)
        grad = (
            data_c.X.T @ loss.gradients(data_c.X @ res.beta_hat, data_c.y)
            + 0.5 * res.beta_hat
            + 0.2 * res.xi
        )
        assert np.linalg.norm(grad) <= 1e-8 * max(1.0, data_c.n)

    def test_bitwise_deterministic(self):
        data, _ = make_regression()
        a = fit_objective_perturbation(data, HuberLoss(1.0), lam=0.7, nu=0.3, seed=5)
        b = fit_objective_perturbation(data, HuberLoss(1.0), lam=0.7, nu=0.3, seed=5)
        np.testing.assert_array_equal(a.beta_hat, b.beta_hat)
        np.testing.assert_array_equal(a.xi, b.xi)

    def test_seed_changes_draw(self):
        data, _ = make_regression()
        a = fit_objective_perturbation(data, HuberLoss(1.0), lam=0.7, nu=0.3, seed=5)
        b = fit_objective_perturbation(data, HuberLoss(1.0), lam=0.7, nu=0.3, seed=6)
        assert not np.array_equal(a.xi, b.xi)
        assert not np.array_equal(a.beta_hat, b.beta_hat)

    def test_beta_tilde_aliases_beta_hat(self):
        data, _ = make_regression()
        res = fit_objective_perturbation(data, HuberLoss(1.0), lam=0.7, nu=0.3, seed=5)
        np.testing.assert_array_equal(res.beta_hat, res.beta_tilde)

    def test_validation(self):
        data, _ = make_regression()
        with pytest.raises(ConfigError):
            fit_objective_perturbation(data, HuberLoss(1.0), lam=0.0, nu=0.1, seed=0)
        with pytest.raises(ConfigError):
            fit_objective_perturbation(data, HuberLoss(1.0), lam=1.0, nu=-0.1, seed=0)


class TestOutputPerturbation:
    def test_shift_identity_exact(self):
        data, _ = make_regression()
        res = fit_output_perturbation(data, HuberLoss(1.0), lam=0.7, nu=0.4, seed=11)
        np.testing.assert_array_equal(res.beta_hat, res.beta_tilde + 0.4 * res.xi)

    def test_inner_solve_ignores_noise_level(self):
        data, _ = make_regression()
        a = fit_output_perturbation(data, HuberLoss(1.0), lam=0.7, nu=0.4, seed=11)
        b = fit_output_perturbation(data, HuberLoss(1.0), lam=0.7, nu=0.0, seed=12)
        np.testing.assert_array_equal(a.beta_tilde, b.beta_tilde)

    def test_matches_objective_perturbation_at_zero_noise(self):
        data, _ = make_regression()
        obj = fit_objective_perturbation(data, HuberLoss(1.0), lam=0.7, nu=0.0, seed=3)
        out = fit_output_perturbation(data, HuberLoss(1.0), lam=0.7, nu=0.0, seed=4)
        np.testing.assert_array_equal(obj.beta_hat, out.beta_tilde)


class TestRidgeClosedForm:
    def test_huge_clip_level_gives_ridge_solution(self):
        # with L far above every residual the Huber objective is exactly
        # least squares, so the minimizer solves (X'X + lam I) beta = X'y
        data, _ = make_regression(noise=0.1)
        lam = 0.9
        res = fit_output_perturbation(data, HuberLoss(1e6), lam=lam, nu=0.0, seed=0)
        direct = np.linalg.solve(
            data.X.T @ data.X + lam * np.eye(data.d), data.X.T @ data.y
        )
        np.testing.assert_allclose(res.beta_tilde, direct, atol=1e-7)

    def test_tilted_ridge_closed_form(self):
        data, _ = make_regression(noise=0.1)
        lam, nu = 0.9, 0.3
        res = fit_objective_perturbation(data, HuberLoss(1e6), lam=lam, nu=nu, seed=8)
        direct = np.linalg.solve(
            data.X.T @ data.X + lam * np.eye(data.d), data.X.T @ data.y - nu * res.xi
        )
        np.testing.assert_allclose(res.beta_hat, direct, atol=1e-7)


class TestNoisyGd:
    loss = HuberCeLoss(L=10.0, noise=ScalarLaw.gaussian(0.2))

    def make_margin_data(self, seed=0, n=50, d=25):
        gen = stream(seed, "erm-test-gd")
        X = box_muller(gen, (n, d)) / np.sqrt(d)
        radius = float(np.linalg.norm(X, axis=1).max()) + 1e-9
        beta_star = box_muller(gen, d)
        return Dataset(X, X @ beta_star, radius), beta_star

    def test_trajectory_shape_and_start(self):
        data, _ = self.make_margin_data()
        traj = run_noisy_gd(data, self.loss, step_size=0.3, nu=0.1, steps=4, seed=2)
        assert traj.shape == (5, data.d)
        np.testing.assert_array_equal(traj[0], np.zeros(data.d))

    def test_first_step_noise_free_closed_form(self):
        # from zero, margins are 0 and the huge-L gradient is -(y - 0), so
        # beta^1 = step * X'y exactly
        data, _ = self.make_margin_data()
        big = HuberCeLoss(L=1e6, noise=ScalarLaw.point_mass(0.0))
        traj = run_noisy_gd(data, big, step_size=0.3, nu=0.0, steps=1, seed=2)
        np.testing.assert_allclose(traj[1], 0.3 * (data.X.T @ data.y), rtol=1e-12)

    def test_bitwise_deterministic(self):
        data, _ = self.make_margin_data()
        a = run_noisy_gd(data, self.loss, step_size=0.3, nu=0.1, steps=3, seed=7)
        b = run_noisy_gd(data, self.loss, step_size=0.3, nu=0.1, steps=3, seed=7)
        np.testing.assert_array_equal(a, b)

    def test_noise_level_shifts_trajectory(self):
        data, _ = self.make_margin_data()
        a = run_noisy_gd(data, self.loss, step_size=0.3, nu=0.0, steps=3, seed=7)
        b = run_noisy_gd(data, self.loss, step_size=0.3, nu=0.1, steps=3, seed=7)
        assert not np.array_equal(a[1], b[1])
        assert not np.array_equal(a[3], b[3])

    def test_logistic_ce_accepted(self):
        data, _ = self.make_margin_data()
        traj = run_noisy_gd(data, LogisticCeLoss(), step_size=0.3, nu=0.1, steps=2, seed=1)
        assert traj.shape == (3, data.d)

    def test_plain_losses_rejected(self):
        data, _ = self.make_margin_data()
        with pytest.raises(ConfigError):
            run_noisy_gd(data, HuberLoss(1.0), step_size=0.3, nu=0.0, steps=1, seed=0)

    def test_validation(self):
        data, _ = self.make_margin_data()
        with pytest.raises(ConfigError):
            run_noisy_gd(data, self.loss, step_size=0.0, nu=0.0, steps=1, seed=0)
        with pytest.raises(ConfigError):
            run_noisy_gd(data, self.loss, step_size=0.1, nu=-0.1, steps=1, seed=0)
        with pytest.raises(ConfigError):
            run_noisy_gd(data, self.loss, step_size=0.1, nu=0.0, steps=0, seed=0)
