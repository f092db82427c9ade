"""Margin-loss families shared by the ERM solvers and the experiment harness.

Every loss here is a function of the per-sample margin m = <x, beta> and the
label y, so full-batch objectives and gradients reduce to vectorized scalar
calculus plus one matrix-vector product.  Each family also reports the
Lipschitz/smoothness constants of its margin derivative, which are exactly the
quantities the privacy accountant needs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .laws import ScalarLaw, law_clipped_mean
from .privacy import GlmSensitivity
from .scalars import clip, expected_huber, huber, logistic_rho, logistic_rho_prime


@dataclass(frozen=True)
class MarginLoss:
    """Base class: a per-sample loss of (margin, label) with scalar calculus."""

    name: str = field(init=False, default="")
    # True for the smoothed losses analyzed by the noisy-GD recursion.
    is_conditional_expectation: bool = field(init=False, default=False)

    def values(self, margins: np.ndarray, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def gradients(self, margins: np.ndarray, y: np.ndarray) -> np.ndarray:
        """Derivative of the per-sample loss with respect to the margin."""
        raise NotImplementedError

    @property
    def lipschitz(self) -> float:
        raise NotImplementedError

    @property
    def smoothness(self) -> float:
        raise NotImplementedError

    def glm_sensitivity(self, feature_radius: float) -> GlmSensitivity:
        return GlmSensitivity(
            lipschitz=self.lipschitz,
            smoothness=self.smoothness,
            feature_radius=feature_radius,
        )


@dataclass(frozen=True)
class HuberLoss(MarginLoss):
    """Robust linear regression: loss(m, y) = H_L(y - m)."""

    L: float = 1.0

    def __post_init__(self):
        if self.L <= 0:
            raise ConfigError("HuberLoss: L must be > 0")
        object.__setattr__(self, "name", "huber")

    def values(self, margins, y):
        return huber(np.asarray(y) - np.asarray(margins), self.L)

    def gradients(self, margins, y):
        return -clip(np.asarray(y) - np.asarray(margins), self.L)

    @property
    def lipschitz(self) -> float:
        return self.L

    @property
    def smoothness(self) -> float:
        return 1.0


@dataclass(frozen=True)
class LogisticLoss(MarginLoss):
    """Binary classification with y in {0, 1}: loss(m, y) = rho(m) - y*m."""

    def __post_init__(self):
        object.__setattr__(self, "name", "logistic")

    def values(self, margins, y):
        margins = np.asarray(margins)
        return logistic_rho(margins) - np.asarray(y) * margins

    def gradients(self, margins, y):
        return logistic_rho_prime(np.asarray(margins)) - np.asarray(y)

    @property
    def lipschitz(self) -> float:
        return 1.0

    @property
    def smoothness(self) -> float:
        return 0.25


@dataclass(frozen=True)
class HuberCeLoss(MarginLoss):
    """Noise-averaged Huber loss for noisy GD: E_eps[H_L(y + eps - m)].

    Labels are noiseless margins y = <x, beta*>; the response-noise law enters
    the loss itself.  The margin gradient has the closed form
    -E_eps[clip(y + eps - m, L)], and values (needed for line searches and
    finite-difference tests) use the matching closed-form Gaussian moments,
    so the two stay consistent to machine precision.
    """

    L: float = 1.0
    noise: ScalarLaw = field(default_factory=lambda: ScalarLaw.point_mass(0.0))

    def __post_init__(self):
        if self.L <= 0:
            raise ConfigError("HuberCeLoss: L must be > 0")
        object.__setattr__(self, "name", "huber_ce")
        object.__setattr__(self, "is_conditional_expectation", True)

    def values(self, margins, y):
        residual = np.asarray(y, dtype=float) - np.asarray(margins, dtype=float)
        total = np.zeros_like(residual)
        for weight, loc, scale in zip(
            self.noise.weights, self.noise.locs, self.noise.scales
        ):
            total += weight * expected_huber(residual + loc, scale, self.L)
        return total

    def gradients(self, margins, y):
        residual = np.asarray(y, dtype=float) - np.asarray(margins, dtype=float)
        return -law_clipped_mean(residual, self.noise, self.L)

    @property
    def lipschitz(self) -> float:
        return self.L

    @property
    def smoothness(self) -> float:
        return 1.0


@dataclass(frozen=True)
class LogisticCeLoss(MarginLoss):
    """Label-averaged logistic loss for noisy GD: labels are real margins
    y = <x, beta*> and the loss is rho(m) - rho'(y) * m."""

    def __post_init__(self):
        object.__setattr__(self, "name", "logistic_ce")
        object.__setattr__(self, "is_conditional_expectation", True)

    def values(self, margins, y):
        margins = np.asarray(margins)
        return logistic_rho(margins) - logistic_rho_prime(np.asarray(y)) * margins

    def gradients(self, margins, y):
        return logistic_rho_prime(np.asarray(margins)) - logistic_rho_prime(
            np.asarray(y)
        )

    @property
    def lipschitz(self) -> float:
        return 1.0

    @property
    def smoothness(self) -> float:
        return 0.25
