"""Stored figure configurations: dense theory curves plus, for the
simulation figures, ready-to-run experiment sweeps.

Every figure is a FigureSpec: ``theory_rows()`` returns CSV-ready dicts with
one row per (curve, grid point, metric); ``configs`` lists the simulation
sweeps whose summaries are plotted as dots on the same axes.  The comparison
figure (fig2) is theory-only: it calibrates each mechanism's noise level to a
shared concentrated-DP budget and plots the resulting risk curves.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import huber_theory, logistic_theory, privacy, state_evolution
from .errors import ConfigError, NonConvergenceError, NumericError
from .harness import ExperimentConfig
from .laws import parse_law
from .rng import child_seed

FIGURE_NAMES = ("fig1", "fig2", "fig4", "fig5", "fig6")

# sample fractions n/(n+d) for the dense theory curves; delta = (1-r)/r
DENSE_RATIOS = tuple(float(r) for r in np.round(np.linspace(0.10, 0.90, 41), 6))


@dataclass(frozen=True)
class FigureSpec:
    name: str
    description: str
    configs: tuple[ExperimentConfig, ...]
    _theory_builder: object

    def theory_rows(self) -> list[dict]:
        return self._theory_builder()


def _row(name: str, label: str, ratio: float, nu: float, metric: str, value: float) -> dict:
    return {
        "figure": name,
        "label": label,
        "ratio": float(ratio),
        "delta": (1.0 - ratio) / ratio,
        "nu": float(nu),
        "metric": metric,
        "value": float(value),
    }


def _huber_curve_rows(name, label, nu, lam, L, signal, noise, *, output=False):
    """Warm-started sweep of the robust-regression system along the grid."""
    rows = []
    guess = None
    for ratio in DENSE_RATIOS:
        delta = (1.0 - ratio) / ratio
        try:
            base = huber_theory.solve_huber_system(
                delta, lam, 0.0 if output else nu, L, signal, noise, initial=guess
            )
        except (NonConvergenceError, NumericError):
            guess = None
            continue
        guess = (base.sigma_star, base.tau_star)
        if output:
            preds = huber_theory.output_perturbation_predictions(base, nu)
        else:
            preds = huber_theory.huber_predictions(base)
        rows.extend(_row(name, label, ratio, nu, k, v) for k, v in preds.items())
    return rows


def _logistic_curve_rows(name, label, nu, lam, kappa, *, output=False):
    rows = []
    guess = None
    for ratio in DENSE_RATIOS:
        delta = (1.0 - ratio) / ratio
        try:
            base = logistic_theory.solve_logistic_system(
                delta, lam, 0.0 if output else nu, kappa, initial=guess
            )
        except (NonConvergenceError, NumericError, ConfigError):
            guess = None
            continue
        guess = (base.alpha_star, base.sigma_star, base.gamma_star)
        if output:
            preds = logistic_theory.output_perturbation_predictions(base, nu)
        else:
            preds = logistic_theory.logistic_predictions(base)
        rows.extend(_row(name, label, ratio, nu, k, v) for k, v in preds.items())
    return rows


def _dpsgd_curve_rows(name, label, nu, steps, signal_str, noise_str, L, *, huber, seed):
    signal = parse_law(signal_str)
    rows = []
    for index, ratio in enumerate(DENSE_RATIOS):
        delta = (1.0 - ratio) / ratio
        step = 0.5 / (1.0 + delta)
        point_seed = child_seed(seed, index)
        try:
            if huber:
                trace = state_evolution.state_evolution_huber(
                    steps, step, nu, delta, signal, parse_law(noise_str), L,
                    seed=point_seed,
                )
            else:
                trace = state_evolution.state_evolution_logistic(
                    steps, step, nu, delta, signal, seed=point_seed
                )
        except (NumericError, ConfigError):
            continue
        for t in range(1, steps + 1):
            rows.append(_row(name, label, ratio, nu, f"estimation_error_t{t}", trace.mse[t]))
            rows.append(_row(name, label, ratio, nu, f"bias_t{t}", trace.bias[t]))
    return rows


# --- fig1: robust regression with a perturbed objective ---------------------

_FIG1_COMMON = dict(
    design="rademacher", total=1000, signal="gaussian:1", noise="gaussian:0.2",
    L=10.0, lam=1.0, replicates=100,
)


def _fig1_theory():
    signal, noise = parse_law("gaussian:1"), parse_law("gaussian:0.2")
    rows = []
    for nu in (0.0, 0.2):
        rows += _huber_curve_rows("fig1", f"objective nu={nu:g}", nu, 1.0, 10.0, signal, noise)
    return rows


FIG1 = FigureSpec(
    "fig1",
    "robust (huber) regression, objective perturbation: four metrics vs "
    "sample fraction at nu in {0, 0.2}",
    tuple(
        ExperimentConfig(model="huber_objective", nu=nu, seed=101, **_FIG1_COMMON)
        for nu in (0.0, 0.2)
    ),
    _fig1_theory,
)


# --- fig2: objective vs output at a matched concentrated-DP budget ----------


def _fig2_theory():
    signal, noise = parse_law("gaussian:1"), parse_law("gaussian:0.1")
    lam = 1.0
    rows = []
    for rho in (1.0, 2.0):
        for loss_name, glm in (
            ("huber", privacy.GlmSensitivity.huber(1.0)),
            ("logistic", privacy.GlmSensitivity.logistic()),
        ):
            for mechanism, calibrate in (
                ("objective", privacy.objective_perturbation_nu_for_zcdp),
                ("output", privacy.output_perturbation_nu_for_zcdp),
            ):
                nu = calibrate(glm, lam, rho)
                label = f"{loss_name} {mechanism} rho={rho:g}"
                if loss_name == "huber":
                    rows += _huber_curve_rows(
                        "fig2", label, nu, lam, 1.0, signal, noise,
                        output=(mechanism == "output"),
                    )
                else:
                    rows += _logistic_curve_rows(
                        "fig2", label, nu, lam, 1.0, output=(mechanism == "output")
                    )
    return [r for r in rows if r["metric"] == "estimation_error"]


FIG2 = FigureSpec(
    "fig2",
    "theory-only: objective vs output perturbation risk at matched zCDP "
    "budgets rho in {1, 2} (huber L=1 with noise std 0.1, and logistic)",
    (),
    _fig2_theory,
)


# --- fig4: logistic regression with a perturbed objective -------------------


def _fig4_theory():
    rows = []
    for nu in (0.0, 0.2):
        rows += _logistic_curve_rows("fig4", f"objective nu={nu:g}", nu, 1.0, 1.0)
    return rows


FIG4 = FigureSpec(
    "fig4",
    "logistic regression, objective perturbation: four metrics vs sample "
    "fraction at nu in {0, 0.2}",
    tuple(
        ExperimentConfig(
            model="logistic_objective", design="rademacher", total=1000,
            signal="gaussian:1", lam=1.0, nu=nu, replicates=200, seed=104,
        )
        for nu in (0.0, 0.2)
    ),
    _fig4_theory,
)


# --- fig5: output perturbation for both losses -------------------------------


def _fig5_theory():
    signal, noise = parse_law("gaussian:1"), parse_law("gaussian:0.2")
    rows = []
    for nu in (0.0, 0.5):
        rows += _huber_curve_rows(
            "fig5", f"huber output nu={nu:g}", nu, 1.0, 10.0, signal, noise, output=True
        )
        rows += _logistic_curve_rows(
            "fig5", f"logistic output nu={nu:g}", nu, 1.0, 1.0, output=True
        )
    return rows


FIG5 = FigureSpec(
    "fig5",
    "output perturbation for huber (L=10, noise std 0.2) and logistic: "
    "estimation error vs sample fraction at nu in {0, 0.5}",
    tuple(
        ExperimentConfig(
            model=model, design="rademacher", total=1000, signal="gaussian:1",
            noise="gaussian:0.2", L=10.0, lam=1.0, nu=nu, replicates=100, seed=105,
        )
        for model in ("huber_output", "logistic_output")
        for nu in (0.0, 0.5)
    ),
    _fig5_theory,
)


# --- fig6: noisy gradient descent on the conditional-expectation losses -----


def _fig6_theory():
    rows = []
    for nu in (0.0, 0.1):
        rows += _dpsgd_curve_rows(
            "fig6", f"huber_ce nu={nu:g}", nu, 3, "gaussian:1", "gaussian:0.2",
            10.0, huber=True, seed=106,
        )
        rows += _dpsgd_curve_rows(
            "fig6", f"logistic_ce nu={nu:g}", nu, 3, "gaussian:1", "", 0.0,
            huber=False, seed=106,
        )
    return rows


FIG6 = FigureSpec(
    "fig6",
    "noisy full-batch gradient descent on the conditional-expectation losses "
    "(labels are noiseless margins): per-step estimation error at nu in "
    "{0, 0.1}, step size 0.5/(1+delta), 3 steps",
    tuple(
        ExperimentConfig(
            model=model, design="rademacher", total=1000, signal="gaussian:1",
            noise="gaussian:0.2", L=10.0, lam=1.0, nu=nu, steps=3,
            replicates=10_000, seed=106,
        )
        for model in ("huber_dpsgd_ce", "logistic_dpsgd_ce")
        for nu in (0.0, 0.1)
    ),
    _fig6_theory,
)


FIGURES = {spec.name: spec for spec in (FIG1, FIG2, FIG4, FIG5, FIG6)}


def get_figure(name: str) -> FigureSpec:
    try:
        return FIGURES[name]
    except KeyError:
        raise ConfigError(
            f"unknown figure {name!r}; available: {', '.join(FIGURE_NAMES)}"
        ) from None
