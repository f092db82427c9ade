"""Noisy-GD state-evolution engine tests.

Reference values come from oracles/oracle_state_evolution.py: a direct
quadrature derivation of the first iterate's moments, and an exact linear-case
computation using frozen spectral moments of the Gram matrix (entries of X
have variance 1/d, d/n = delta).  Bias is exact in the linear case because
the gradient-slope scalars are constant there; mse carries the engine's
covariance-estimation noise, so those comparisons use loose tolerances.
"""

import math

import numpy as np
import pytest

from propdp.errors import ConfigError
from propdp.laws import ScalarLaw
from propdp.state_evolution import (
    MAX_STEPS,
    MIN_MC_SAMPLES,
    StateEvolutionTrace,
    state_evolution_huber,
    state_evolution_logistic,
)

G1 = ScalarLaw.gaussian(1.0)
NOISE_02 = ScalarLaw.gaussian(0.2)
EXACT_LINE = ScalarLaw.point_mass(0.0)


def gram_moment(j: int, delta: float) -> float:
    # spectral moments E[s^j] of X'X in the proportional regime, frozen from
    # oracles/oracle_state_evolution.py
    table = {
        0: 1.0,
        1: 1 / delta,
        2: (1 + delta) / delta**2,
        3: (1 + 3 * delta + delta**2) / delta**3,
        4: (1 + 6 * delta + 6 * delta**2 + delta**3) / delta**4,
        5: (1 + 10 * delta + 20 * delta**2 + 10 * delta**3 + delta**4) / delta**5,
        6: (1 + 15 * delta + 50 * delta**2 + 50 * delta**3 + 15 * delta**4 + delta**5) / delta**6,
    }
    return table[j]


def contraction_moment(k: int, gamma: float, delta: float) -> float:
    """E[(1 - gamma*s)^k] by binomial expansion over the spectral moments."""
    return sum(math.comb(k, j) * (-gamma) ** j * gram_moment(j, delta) for j in range(k + 1))


def exact_linear_trace(T: int, gamma: float, delta: float, nu: float):
    """Per-iterate (mse, bias) of noisy GD on exact linear labels, no clipping.

    beta^t - beta* = (I - gamma*S)^t (-beta*) - gamma*nu*sum_j (I - gamma*S)^j xi_j.
    """
    mse, bias = [], []
    for t in range(T + 1):
        noise_part = gamma**2 * nu**2 * sum(
            contraction_moment(2 * j, gamma, delta) for j in range(t)
        )
        mse.append(contraction_moment(2 * t, gamma, delta) + noise_part)
        bias.append(1.0 - contraction_moment(t, gamma, delta))
    return np.array(mse), np.array(bias)


class TestFirstIterateHuber:
    def test_frozen_bias_and_mse(self):
        # frozen from oracles/oracle_state_evolution.py (nested quadrature):
        # step=1/3, delta=0.5, noise std 0.2, L=10 -> clipping inactive, so
        # bias(1) = (step/delta) kappa^2 = 2/3 exactly and
        # mse(1) = (2/3 - 1)^2 + (step^2/delta) E[m^2] = 0.3333333333333515
        tr = state_evolution_huber(
            1, 1 / 3, 0.0, 0.5, G1, NOISE_02, 10.0, mc_samples=200_000, seed=42
        )
        assert tr.bias[1] == pytest.approx(0.6666666666666121, abs=1e-9)
        assert tr.mse[1] == pytest.approx(0.3333333333333515, abs=4e-3)
        assert tr.mse[0] == pytest.approx(1.0, abs=1e-12)
        assert tr.bias[0] == 0.0

    def test_frozen_private(self):
        tr = state_evolution_huber(
            1, 1 / 3, 0.1, 0.5, G1, NOISE_02, 10.0, mc_samples=200_000, seed=42
        )
        # frozen oracle value 0.33444444444446264
        assert tr.mse[1] == pytest.approx(0.33444444444446264, abs=4e-3)

    def test_noise_shift_is_exact_at_shared_seed(self):
        # with one step the kernels never see nu, so at the same seed
        # mse(1; nu) - mse(1; 0) = step^2 nu^2 to machine precision
        quiet = state_evolution_huber(
            1, 1 / 3, 0.0, 0.5, G1, NOISE_02, 10.0, mc_samples=50_000, seed=7
        )
        loud = state_evolution_huber(
            1, 1 / 3, 0.1, 0.5, G1, NOISE_02, 10.0, mc_samples=50_000, seed=7
        )
        assert loud.mse[1] - quiet.mse[1] == pytest.approx((1 / 9) * 0.01, abs=1e-12)
        assert loud.bias[1] == quiet.bias[1]


class TestFirstIterateLogistic:
    def test_frozen_bias_and_mse(self):
        # frozen from oracles/oracle_state_evolution.py:
        # bias(1) = (step/delta) E[(rho'(m) - 1/2) m] = 0.13774730942793467
        # (equivalently (step/delta) kappa^2 E[rho''(m)] by Stein's identity),
        # mse(1) = (bias(1) - 1)^2 + (step^2/delta) E[(1/2 - rho'(m))^2]
        tr = state_evolution_logistic(1, 1 / 3, 0.0, 0.5, G1, mc_samples=400_000, seed=43)
        assert tr.bias[1] == pytest.approx(0.13774730942793467, abs=3e-4)
        assert tr.mse[1] == pytest.approx(0.7531194881450086, abs=1e-3)

    def test_frozen_private(self):
        tr = state_evolution_logistic(1, 1 / 3, 0.1, 0.5, G1, mc_samples=400_000, seed=43)
        assert tr.mse[1] == pytest.approx(0.7542305992561197, abs=1e-3)

    def test_noise_shift_is_exact_at_shared_seed(self):
        quiet = state_evolution_logistic(1, 1 / 3, 0.0, 0.5, G1, mc_samples=50_000, seed=9)
        loud = state_evolution_logistic(1, 1 / 3, 0.1, 0.5, G1, mc_samples=50_000, seed=9)
        assert loud.mse[1] - quiet.mse[1] == pytest.approx((1 / 9) * 0.01, abs=1e-12)


class TestExactLinearCase:
    """Huge clip level + zero response noise + exact margins: the recursion
    collapses to ridgeless linear GD, solvable in closed form."""

    def test_three_steps_noise_free(self):
        exact_mse, exact_bias = exact_linear_trace(3, 0.5, 0.5, 0.0)
        np.testing.assert_allclose(exact_mse, [1.0, 0.5, 0.625, 1.21875], rtol=1e-12)
        tr = state_evolution_huber(
            3, 0.5, 0.0, 0.5, G1, EXACT_LINE, 1e9, mc_samples=200_000, seed=44
        )
        # the slope scalars are constant, so the kernel recursion and hence
        # the bias sequence are exact; mse carries Gram-estimation noise
        np.testing.assert_allclose(tr.bias, exact_bias, atol=1e-8)
        np.testing.assert_allclose(tr.mse, exact_mse, rtol=0.02)

    def test_three_steps_private(self):
        # frozen from oracles/oracle_state_evolution.py at step=1/3, nu=0.1
        exact_mse, exact_bias = exact_linear_trace(3, 1 / 3, 0.5, 0.1)
        np.testing.assert_allclose(
            exact_mse,
            [1.0, 0.3344444444444445, 0.18666666666666704, 0.12102880658436282],
            rtol=1e-12,
        )
        tr = state_evolution_huber(
            3, 1 / 3, 0.1, 0.5, G1, EXACT_LINE, 1e9, mc_samples=200_000, seed=45
        )
        np.testing.assert_allclose(tr.bias, exact_bias, atol=1e-8)
        np.testing.assert_allclose(tr.mse, exact_mse, rtol=0.02)


class TestInternalConsistency:
    def make(self, **kw):
        args = dict(mc_samples=50_000, seed=11)
        args.update(kw)
        return state_evolution_huber(3, 0.4, 0.1, 0.5, G1, NOISE_02, 10.0, **args)

    def test_kernel_mse_matches_path_mc(self):
        tr = self.make()
        for t in range(1, 4):
            assert abs(tr.mse[t] - tr.mse_mc[t]) <= 5 * tr.mse_stderr[t]
            assert abs(tr.bias[t] - tr.bias_mc[t]) <= 5 * tr.bias_stderr[t]

    def test_r_theta_diagonal_is_identity(self):
        tr = self.make()
        for t in range(4):
            np.testing.assert_array_equal(tr.r_theta[t, t], np.eye(2))

    def test_gamma_bottom_row_zero(self):
        tr = self.make()
        assert tr.gamma.shape == (3, 2, 2)
        np.testing.assert_array_equal(tr.gamma[:, 1, :], 0.0)

    def test_c_theta_symmetric_psd(self):
        tr = self.make()
        top = tr.c_theta[:, :, 0, 0]
        np.testing.assert_allclose(top, top.T, rtol=0, atol=1e-12)
        eigs = np.linalg.eigvalsh(0.5 * (top + top.T))
        assert eigs.min() >= -1e-10
        # the signal slot stores kappa^2 on every diagonal block
        np.testing.assert_allclose(tr.c_theta[:, :, 1, 1], 1.0, rtol=1e-12)

    def test_seed_determinism_bitwise(self):
        a = self.make()
        b = self.make()
        for field in ("mse", "bias", "mse_mc", "bias_mc", "gamma", "r_g", "c_theta"):
            np.testing.assert_array_equal(getattr(a, field), getattr(b, field))

    def test_seed_changes_mc(self):
        a = self.make()
        b = self.make(seed=12)
        assert not np.array_equal(a.mse_mc, b.mse_mc)

    def test_as_dict_round_trip(self):
        d = self.make().as_dict()
        assert d["steps"] == 3
        assert len(d["mse"]) == 4
        assert isinstance(d["mse"], list)


class TestLogisticStructure:
    def test_trace_type_and_growth(self):
        tr = state_evolution_logistic(2, 0.4, 0.2, 0.5, G1, mc_samples=20_000, seed=3)
        assert isinstance(tr, StateEvolutionTrace)
        assert tr.mse.shape == (3,)
        # error declines from the zero initialization on the first step
        assert tr.mse[1] < tr.mse[0]


class TestValidation:
    def test_bad_inputs(self):
        with pytest.raises(ConfigError):
            state_evolution_huber(0, 0.3, 0.0, 0.5, G1, NOISE_02, 10.0)
        with pytest.raises(ConfigError):
            state_evolution_huber(MAX_STEPS + 1, 0.3, 0.0, 0.5, G1, NOISE_02, 10.0)
        with pytest.raises(ConfigError):
            state_evolution_huber(1, 0.3, 0.0, 0.5, G1, NOISE_02, 10.0, mc_samples=MIN_MC_SAMPLES - 1)
        with pytest.raises(ConfigError):
            state_evolution_huber(1, 0.0, 0.0, 0.5, G1, NOISE_02, 10.0)
        with pytest.raises(ConfigError):
            state_evolution_huber(1, 0.3, -0.1, 0.5, G1, NOISE_02, 10.0)
        with pytest.raises(ConfigError):
            state_evolution_huber(1, 0.3, 0.0, 0.0, G1, NOISE_02, 10.0)
        with pytest.raises(ConfigError):
            state_evolution_huber(1, 0.3, 0.0, 0.5, G1, NOISE_02, 0.0)
        with pytest.raises(ConfigError):
            state_evolution_logistic(1, 0.3, 0.0, -0.5, G1)
