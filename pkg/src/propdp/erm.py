"""The three private learners on finite data, plus the deterministic convex
optimizer they share.

All objectives have the form

    F(beta) = sum_i loss(<x_i, beta>, y_i) + (lam/2)||beta||^2 + nu*<xi, beta>

which is lam-strongly convex and (lam + smoothness*||X||_2^2)-smooth, so plain
full-batch gradient descent with an Armijo backtracking line search converges
deterministically.  Perturbation vectors come from counter-based streams keyed
by (seed, purpose tag), never by the data.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NonConvergenceError
from .losses import MarginLoss
from .rng import box_muller, stream

ARMIJO_SLOPE = 1e-4
MAX_HALVINGS = 60
MAX_ITERATIONS = 100_000
GRADIENT_TOL_SCALE = 1e-9


@dataclass(frozen=True)
class Dataset:
    """Feature rows with a verified norm bound and a matching label vector."""

    X: np.ndarray
    y: np.ndarray
    feature_radius: float

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise ConfigError("Dataset: X must be a nonempty n x d matrix")
        if y.shape != (X.shape[0],):
            raise ConfigError("Dataset: y must have one entry per row of X")
        if not (np.isfinite(X).all() and np.isfinite(y).all()):
            raise ConfigError("Dataset: non-finite entries")
        if self.feature_radius <= 0:
            raise ConfigError("Dataset: feature_radius must be > 0")
        row_norms = np.linalg.norm(X, axis=1)
        worst = float(row_norms.max())
        if worst > self.feature_radius + 1e-9:
            raise ConfigError(
                f"Dataset: row norm {worst:.6g} exceeds feature_radius "
                f"{self.feature_radius:.6g}"
            )
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class FitResult:
    """Fitted coefficients with the perturbation draw and optimizer evidence.

    For output perturbation, `beta_tilde` is the unperturbed minimizer and
    `grad_norm`/`objective_value` certify that inner solve; for objective
    perturbation, `beta_tilde` equals `beta_hat`.
    """

    beta_hat: np.ndarray
    beta_tilde: np.ndarray
    xi: np.ndarray
    grad_norm: float
    iterations: int
    objective_value: float


def _minimize(
    data: Dataset, loss: MarginLoss, lam: float, nu: float, xi: np.ndarray
) -> tuple[np.ndarray, float, int, float]:
    """Gradient descent with Armijo backtracking on the perturbed objective."""
    X, y = data.X, data.y
    tol = GRADIENT_TOL_SCALE * max(1.0, data.n)
    spectral_sq = float(np.linalg.norm(X, 2)) ** 2
    step0 = 2.0 / (lam + loss.smoothness * spectral_sq)
    # At or below 1/(lam + s*||X||^2) the descent lemma guarantees progress,
    # so the sufficient-decrease test is skipped there; near the optimum the
    # test compares values below float64 resolution and would stall.
    step_floor = 0.5 * step0

    def objective(beta: np.ndarray) -> float:
        margins = X @ beta
        return float(
            loss.values(margins, y).sum()
            + 0.5 * lam * (beta @ beta)
            + nu * (xi @ beta)
        )

    def gradient(beta: np.ndarray) -> np.ndarray:
        margins = X @ beta
        return X.T @ loss.gradients(margins, y) + lam * beta + nu * xi

    beta = np.zeros(data.d)
    value = objective(beta)
    for iteration in range(MAX_ITERATIONS):
        grad = gradient(beta)
        norm = float(np.linalg.norm(grad))
        if norm <= tol:
            return beta, norm, iteration, value
        step = step0
        slope = ARMIJO_SLOPE * norm**2
        for _ in range(MAX_HALVINGS):
            trial = beta - step * grad
            trial_value = objective(trial)
            if trial_value <= value - step * slope or step <= step_floor:
                beta, value = trial, trial_value
                break
            step *= 0.5
        else:
            raise NonConvergenceError(
                "line search stalled", last_iterate=beta, residual=norm
            )
    raise NonConvergenceError(
        "gradient descent hit the iteration cap",
        last_iterate=beta,
        residual=float(np.linalg.norm(gradient(beta))),
    )


def _draw_xi(seed: int, tag: str, d: int) -> np.ndarray:
    return box_muller(stream(seed, tag), d)


def fit_objective_perturbation(
    data: Dataset, loss: MarginLoss, lam: float, nu: float, seed: int
) -> FitResult:
    """Minimize the regularized objective with a random linear tilt nu*<xi, beta>."""
    if lam <= 0:
        raise ConfigError("fit_objective_perturbation: lam must be > 0")
    if nu < 0:
        raise ConfigError("fit_objective_perturbation: nu must be >= 0")
    xi = _draw_xi(seed, "objective-perturbation-xi", data.d)
    beta, norm, iterations, value = _minimize(data, loss, lam, nu, xi)
    return FitResult(
        beta_hat=beta,
        beta_tilde=beta,
        xi=xi,
        grad_norm=norm,
        iterations=iterations,
        objective_value=value,
    )


def fit_output_perturbation(
    data: Dataset, loss: MarginLoss, lam: float, nu: float, seed: int
) -> FitResult:
    """Minimize the unperturbed regularized objective, then add nu*xi."""
    if lam <= 0:
        raise ConfigError("fit_output_perturbation: lam must be > 0")
    if nu < 0:
        raise ConfigError("fit_output_perturbation: nu must be >= 0")
    xi = _draw_xi(seed, "output-perturbation-xi", data.d)
    beta, norm, iterations, value = _minimize(
        data, loss, lam, 0.0, np.zeros(data.d)
    )
    return FitResult(
        beta_hat=beta + nu * xi,
        beta_tilde=beta,
        xi=xi,
        grad_norm=norm,
        iterations=iterations,
        objective_value=value,
    )


def run_noisy_gd(
    data: Dataset,
    loss: MarginLoss,
    step_size: float,
    nu: float,
    steps: int,
    seed: int,
) -> np.ndarray:
    """Noisy full-batch gradient descent from zero; returns all T+1 iterates.

    Each step subtracts step_size times the summed (not averaged) per-sample
    gradient plus fresh Gaussian noise: no ridge term is involved.
    """
    if not loss.is_conditional_expectation:
        raise ConfigError(
            "run_noisy_gd: requires a conditional-expectation loss family"
        )
    if step_size <= 0:
        raise ConfigError("run_noisy_gd: step_size must be > 0")
    if nu < 0:
        raise ConfigError("run_noisy_gd: nu must be >= 0")
    if steps < 1:
        raise ConfigError("run_noisy_gd: steps must be >= 1")
    X, y = data.X, data.y
    trajectory = np.zeros((steps + 1, data.d))
    beta = np.zeros(data.d)
    for t in range(steps):
        grad = X.T @ loss.gradients(X @ beta, y)
        if nu > 0:
            grad = grad + nu * box_muller(stream(seed, "noisy-gd-xi", t), data.d)
        beta = beta - step_size * grad
        trajectory[t + 1] = beta
    return trajectory
