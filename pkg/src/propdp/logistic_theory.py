"""Asymptotic error of objective perturbation for ridge-regularized logistic
regression in the proportional regime d/n -> delta.

Three scalars (alpha*, sigma*, gamma*) solve a fixed-point system whose
expectations run over two independent standard normals, with the logistic
prox evaluated at every quadrature node.  The label variable enters through
the two Bernoulli branches weighted by sigmoid(+/- kappa Z1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import newton, quadrature
from .errors import ConfigError
from .scalars import (
    logistic_rho_prime,
    logistic_rho_second,
    prox_logistic,
)

MIN_LAMBDA = 1e-8


def _expectations(
    alpha: float, sigma: float, gamma: float, kappa: float, nodes: int
) -> tuple[float, float, float]:
    """The three 2-D expectations of the system at (alpha, sigma, gamma)."""
    z1, z2, w = quadrature.standard_normal_rule_2d(nodes)
    weight = 2.0 * logistic_rho_prime(-kappa * z1) * w
    arg = kappa * alpha * z1 + sigma * z2
    p = prox_logistic(arg, gamma)
    rp = logistic_rho_prime(p)
    e1 = float(np.dot(weight, rp * rp))
    e2 = float(np.dot(2.0 * logistic_rho_second(-kappa * z1) * w, p))
    e3 = float(np.dot(weight, 1.0 / (1.0 + gamma * logistic_rho_second(p))))
    return e1, e2, e3


def system_residual(
    alpha: float,
    sigma: float,
    gamma: float,
    *,
    delta: float,
    lam: float,
    nu: float,
    kappa: float,
    nodes: int = quadrature.DEFAULT_NODES_2D,
) -> np.ndarray:
    """Residuals of the three fixed-point equations at (alpha, sigma, gamma)."""
    e1, e2, e3 = _expectations(alpha, sigma, gamma, kappa, nodes)
    f1 = sigma**2 - gamma**2 * (e1 / delta + nu**2)
    f2 = alpha + e2 / delta
    f3 = gamma - (delta - 1.0 + e3) / (lam * delta)
    return np.array([f1, f2, f3])


@dataclass(frozen=True)
class LogisticSolution:
    """Solved (alpha*, sigma*, gamma*) with input echo and diagnostics."""

    alpha_star: float
    sigma_star: float
    gamma_star: float
    residual_norm: float
    delta: float
    lam: float
    nu: float
    kappa: float
    iterations: int = 0
    condition_number: float = float("nan")
    roots: tuple[tuple[float, float, float], ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.sigma_star < self.gamma_star * self.nu - 1e-9:
            raise ConfigError("LogisticSolution: sigma* < gamma*·nu (no valid error law)")

    def as_dict(self) -> dict:
        return {
            "alpha_star": self.alpha_star,
            "sigma_star": self.sigma_star,
            "gamma_star": self.gamma_star,
            "residual_norm": self.residual_norm,
            "delta": self.delta,
            "lambda": self.lam,
            "nu": self.nu,
            "kappa": self.kappa,
            "iterations": self.iterations,
            "condition_number": self.condition_number,
        }


def solve_logistic_system(
    delta: float,
    lam: float,
    nu: float,
    kappa: float,
    *,
    nodes: int = quadrature.DEFAULT_NODES_2D,
    initial: tuple[float, float, float] | None = None,
    enumerate_all_roots: bool = False,
) -> LogisticSolution:
    """Solve the three-equation system for (alpha*, sigma*, gamma*)."""
    if delta <= 0:
        raise ConfigError("solve_logistic_system: delta must be > 0")
    if lam < MIN_LAMBDA:
        raise ConfigError(f"solve_logistic_system: lam below the {MIN_LAMBDA} conditioning floor")
    if nu < 0:
        raise ConfigError("solve_logistic_system: nu must be >= 0")
    if kappa <= 0:
        raise ConfigError("solve_logistic_system: kappa must be > 0")

    def f(x: np.ndarray) -> np.ndarray:
        return system_residual(
            x[0], x[1], x[2], delta=delta, lam=lam, nu=nu, kappa=kappa, nodes=nodes
        )

    x0 = np.asarray(initial, dtype=float) if initial is not None else np.array(
        [1.0, kappa, 1.0 / (2.0 * lam + 1.0)]
    )
    res = newton.solve_with_multistart(f, x0)
    roots: tuple[tuple[float, float, float], ...] = ()
    if enumerate_all_roots:
        roots = tuple(
            (float(r.x[0]), float(r.x[1]), float(r.x[2])) for r in newton.enumerate_roots(f, x0)
        )
    return LogisticSolution(
        alpha_star=float(res.x[0]),
        sigma_star=float(res.x[1]),
        gamma_star=float(res.x[2]),
        residual_norm=res.residual_norm,
        delta=delta,
        lam=lam,
        nu=nu,
        kappa=kappa,
        iterations=res.iterations,
        condition_number=res.condition_number,
        roots=roots,
    )


def rho_prime_difference(sol: LogisticSolution, *, nodes: int = quadrature.DEFAULT_NODES_2D) -> float:
    """E[(sigmoid(kappa Z1) - v0)**2] where v0 is the limiting value of the
    fitted success probability sigmoid(<x, beta_hat>).

    v0 = sigmoid(prox_{gamma* rho}(alpha* kappa Z1 + sigma* Z2 + gamma* y0)) with
    y0 | Z1 ~ Bernoulli(sigmoid(kappa Z1)); both label branches are integrated
    with their conditional weights.
    """
    z1, z2, w = quadrature.standard_normal_rule_2d(nodes)
    target = logistic_rho_prime(sol.kappa * z1)
    arg = sol.alpha_star * sol.kappa * z1 + sol.sigma_star * z2
    v_pos = logistic_rho_prime(prox_logistic(arg + sol.gamma_star, sol.gamma_star))
    v_neg = logistic_rho_prime(prox_logistic(arg, sol.gamma_star))
    branch = target * (target - v_pos) ** 2 + (1.0 - target) * (target - v_neg) ** 2
    return float(np.dot(w, branch))


def logistic_predictions(sol: LogisticSolution) -> dict[str, float]:
    """Predicted empirical metrics under the limiting laws."""
    kappa_sq = sol.kappa**2
    return {
        "estimation_error": (1.0 - sol.alpha_star) ** 2 * kappa_sq + sol.sigma_star**2,
        "bias": sol.alpha_star * kappa_sq,
        "xi_correlation": -sol.gamma_star * sol.nu,
        "rho_diff": rho_prime_difference(sol),
    }


def output_perturbation_predictions(base: LogisticSolution, nu: float) -> dict[str, float]:
    """Metrics for adding nu*xi to the non-private minimizer (base has nu=0)."""
    if base.nu != 0.0:
        raise ConfigError("output_perturbation_predictions: base solution must have nu = 0")
    if nu < 0:
        raise ConfigError("output_perturbation_predictions: nu must be >= 0")
    preds = logistic_predictions(base)
    return {
        "estimation_error": preds["estimation_error"] + nu**2,
        "bias": preds["bias"],
        "xi_correlation": nu,
        # rho_diff of the perturbed output has no closed form here
    }
