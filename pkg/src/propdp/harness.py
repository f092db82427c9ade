"""Seeded synthetic-data experiments that pair empirical averages with the
asymptotic predictions.

A sweep fixes n*d and walks the sample-fraction grid n/(n+d); each grid point
solves the matching limit system once and runs seeded replicates of the
configured learner.  Child seeds are derived from (master seed, grid index,
replicate index) so no two cells share a random stream and reruns are
bit-identical.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import erm, huber_theory, logistic_theory, state_evolution
from .errors import ConfigError, NumericError
from .laws import ScalarLaw, parse_law
from .losses import HuberCeLoss, HuberLoss, LogisticCeLoss, LogisticLoss
from .rng import box_muller, child_seed, stream
from .scalars import clip, logistic_rho_prime

RATIO_GRID = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)

MODELS = (
    "huber_objective",
    "huber_output",
    "logistic_objective",
    "logistic_output",
    "huber_dpsgd_ce",
    "logistic_dpsgd_ce",
)
DESIGNS = ("rademacher", "gaussian", "bounded_uniform")


def grid_from_ratios(total: int, ratios=RATIO_GRID) -> tuple[tuple[int, int], ...]:
    """(n, d) pairs with n*d ~= total along the sample-fraction sweep."""
    points = []
    for ratio in ratios:
        if not 0.0 < ratio < 1.0:
            raise ConfigError("grid_from_ratios: ratios must lie in (0, 1)")
        n_exact = math.sqrt(total * ratio / (1.0 - ratio))
        d_exact = total / n_exact
        points.append((max(2, round(n_exact)), max(2, round(d_exact))))
    return tuple(points)


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one simulation sweep."""

    model: str
    design: str = "rademacher"
    total: int = 1000
    ratios: tuple[float, ...] = RATIO_GRID
    grid: tuple[tuple[int, int], ...] | None = None
    signal: str = "gaussian:1"
    noise: str = "gaussian:0.2"
    L: float = 10.0
    lam: float = 1.0
    nu: float = 0.0
    step_size: float | None = None
    steps: int = 3
    replicates: int = 100
    mc_samples: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError(f"ExperimentConfig: unknown model {self.model!r}")
        if self.design not in DESIGNS:
            raise ConfigError(f"ExperimentConfig: unknown design {self.design!r}")
        if self.replicates < 1:
            raise ConfigError("ExperimentConfig: replicates must be >= 1")
        if self.nu < 0 or self.lam < 0 or self.L <= 0:
            raise ConfigError("ExperimentConfig: scales out of range")
        if self.nu > 0 and self.design == "gaussian":
            raise ConfigError(
                "ExperimentConfig: gaussian designs have unbounded rows and are "
                "theory-only; private runs (nu > 0) need rademacher or "
                "bounded_uniform"
            )
        parse_law(self.signal)
        parse_law(self.noise)

    def grid_points(self) -> tuple[tuple[int, int], ...]:
        if self.grid is not None:
            return tuple((int(n), int(d)) for n, d in self.grid)
        return grid_from_ratios(self.total, self.ratios)

    def step_size_at(self, delta: float) -> float:
        return self.step_size if self.step_size is not None else 0.5 / (1.0 + delta)


@dataclass(frozen=True)
class MetricRecord:
    """One replicate's empirical metrics paired with the point's predictions."""

    model: str
    design: str
    n: int
    d: int
    delta: float
    lam: float
    nu: float
    L: float
    kappa: float
    sigma_eps: str
    replicate: int
    seed: int
    empirical: dict
    theory: dict | None
    wall_time: float
    bounded_design: bool


def gen_design(n: int, d: int, kind: str, seed: int) -> np.ndarray:
    """Feature matrix with independent mean-zero, variance-1/d entries."""
    gen = stream(seed, "design")
    root_d = math.sqrt(d)
    if kind == "rademacher":
        return (2.0 * gen.integers(0, 2, size=(n, d)) - 1.0) / root_d
    if kind == "gaussian":
        return box_muller(gen, n * d).reshape(n, d) / root_d
    if kind == "bounded_uniform":
        return (2.0 * gen.random((n, d)) - 1.0) * math.sqrt(3.0) / root_d
    raise ConfigError(f"gen_design: unknown design {kind!r}")


def design_radius(X: np.ndarray, kind: str) -> float:
    """Feature-norm bound: exact for bounded designs, empirical for gaussian."""
    if kind == "rademacher":
        return 1.0 + 1e-9
    if kind == "bounded_uniform":
        return math.sqrt(3.0)
    return float(np.linalg.norm(X, axis=1).max()) + 1e-9


def gen_signal(d: int, law: ScalarLaw, seed: int) -> np.ndarray:
    return law.sample(stream(seed, "signal"), d)


def gen_linear_labels(
    X: np.ndarray, beta_star: np.ndarray, noise: ScalarLaw, seed: int
) -> np.ndarray:
    return X @ beta_star + noise.sample(stream(seed, "noise"), X.shape[0])


def gen_logistic_labels(X: np.ndarray, beta_star: np.ndarray, seed: int) -> np.ndarray:
    probs = logistic_rho_prime(X @ beta_star)
    return (stream(seed, "labels").random(X.shape[0]) < probs).astype(float)


def empirical_metrics(
    beta_hat: np.ndarray,
    beta_star: np.ndarray,
    xi: np.ndarray,
    X: np.ndarray,
    y: np.ndarray,
    model: str,
    *,
    L: float = 1.0,
    beta_tilde: np.ndarray | None = None,
) -> dict:
    """Per-replicate summary statistics of one fitted coefficient vector."""
    d = beta_star.shape[0]
    n = X.shape[0]
    error = beta_hat - beta_star
    metrics = {
        "estimation_error": float(error @ error) / d,
        "bias": float(beta_hat @ beta_star) / d,
    }
    if model.endswith("_output"):
        if beta_tilde is None:
            raise ConfigError("empirical_metrics: output models need beta_tilde")
        metrics["xi_correlation"] = float((beta_hat - beta_tilde) @ xi) / d
    else:
        metrics["xi_correlation"] = float(error @ xi) / d
    if model.startswith("huber"):
        residual = clip(y - X @ beta_hat, L)
        metrics["truncated_residual"] = float(residual @ residual) / n
    else:
        diff = logistic_rho_prime(X @ beta_star) - logistic_rho_prime(X @ beta_hat)
        metrics["rho_diff"] = float(diff @ diff) / n
    return metrics


def _noise_echo(config: ExperimentConfig) -> str:
    if config.model.startswith("logistic"):
        return ""
    law = parse_law(config.noise)
    if law.weights == (1.0,) and law.locs == (0.0,):
        return repr(float(law.scales[0]))
    return config.noise


def solve_theory(config: ExperimentConfig, n: int, d: int, grid_index: int) -> dict | None:
    """Predictions for one grid point; None when the solver fails."""
    delta = d / n
    signal = parse_law(config.signal)
    noise = parse_law(config.noise)
    kappa = math.sqrt(signal.second_moment)
    try:
        if config.model == "huber_objective":
            sol = huber_theory.solve_huber_system(
                delta, config.lam, config.nu, config.L, signal, noise
            )
            return huber_theory.huber_predictions(sol)
        if config.model == "huber_output":
            base = huber_theory.solve_huber_system(
                delta, config.lam, 0.0, config.L, signal, noise
            )
            return huber_theory.output_perturbation_predictions(base, config.nu)
        if config.model == "logistic_objective":
            sol = logistic_theory.solve_logistic_system(
                delta, config.lam, config.nu, kappa
            )
            return logistic_theory.logistic_predictions(sol)
        if config.model == "logistic_output":
            base = logistic_theory.solve_logistic_system(delta, config.lam, 0.0, kappa)
            return logistic_theory.output_perturbation_predictions(base, config.nu)
        trace = _solve_trace(config, delta, grid_index)
        out = {}
        for t in range(1, config.steps + 1):
            out[f"estimation_error_t{t}"] = float(trace.mse[t])
            out[f"bias_t{t}"] = float(trace.bias[t])
        return out
    except (NumericError, ConfigError):
        return None


def _solve_trace(config: ExperimentConfig, delta: float, grid_index: int):
    signal = parse_law(config.signal)
    seed = child_seed(config.seed, grid_index)
    if config.model == "huber_dpsgd_ce":
        return state_evolution.state_evolution_huber(
            config.steps,
            config.step_size_at(delta),
            config.nu,
            delta,
            signal,
            parse_law(config.noise),
            config.L,
            mc_samples=config.mc_samples,
            seed=seed,
        )
    return state_evolution.state_evolution_logistic(
        config.steps,
        config.step_size_at(delta),
        config.nu,
        delta,
        signal,
        mc_samples=config.mc_samples,
        seed=seed,
    )


def _run_cell(args) -> MetricRecord:
    config, grid_index, n, d, replicate, theory = args
    started = time.perf_counter()
    seed = child_seed(config.seed, grid_index, replicate)
    signal = parse_law(config.signal)
    noise = parse_law(config.noise)
    delta = d / n

    X = gen_design(n, d, config.design, seed)
    beta_star = gen_signal(d, signal, seed)
    radius = design_radius(X, config.design)

    if config.model.endswith("_dpsgd_ce"):
        y = X @ beta_star
        data = erm.Dataset(X, y, radius)
        if config.model == "huber_dpsgd_ce":
            loss = HuberCeLoss(config.L, noise)
        else:
            loss = LogisticCeLoss()
        trajectory = erm.run_noisy_gd(
            data, loss, config.step_size_at(delta), config.nu, config.steps, seed
        )
        empirical = {}
        for t in range(1, config.steps + 1):
            err = trajectory[t] - beta_star
            empirical[f"estimation_error_t{t}"] = float(err @ err) / d
            empirical[f"bias_t{t}"] = float(trajectory[t] @ beta_star) / d
    else:
        if config.model.startswith("huber"):
            y = gen_linear_labels(X, beta_star, noise, seed)
            loss = HuberLoss(config.L)
        else:
            y = gen_logistic_labels(X, beta_star, seed)
            loss = LogisticLoss()
        data = erm.Dataset(X, y, radius)
        if config.model.endswith("_objective"):
            fit = erm.fit_objective_perturbation(
                data, loss, config.lam, config.nu, seed
            )
        else:
            fit = erm.fit_output_perturbation(data, loss, config.lam, config.nu, seed)
        empirical = empirical_metrics(
            fit.beta_hat,
            beta_star,
            fit.xi,
            X,
            y,
            config.model,
            L=config.L,
            beta_tilde=fit.beta_tilde,
        )

    return MetricRecord(
        model=config.model,
        design=config.design,
        n=n,
        d=d,
        delta=delta,
        lam=config.lam,
        nu=config.nu,
        L=config.L,
        kappa=math.sqrt(signal.second_moment),
        sigma_eps=_noise_echo(config),
        replicate=replicate,
        seed=seed,
        empirical=empirical,
        theory=theory,
        wall_time=time.perf_counter() - started,
        bounded_design=config.design != "gaussian",
    )


def run_experiment(config: ExperimentConfig, *, jobs: int = 1) -> list[MetricRecord]:
    """All replicates over the configured grid, ordered by (grid, replicate)."""
    cells = []
    for grid_index, (n, d) in enumerate(config.grid_points()):
        theory = solve_theory(config, n, d, grid_index)
        for replicate in range(config.replicates):
            cells.append((config, grid_index, n, d, replicate, theory))
    if jobs <= 1 or len(cells) <= 1:
        return [_run_cell(cell) for cell in cells]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        chunk = max(1, len(cells) // (8 * jobs))
        return list(pool.map(_run_cell, cells, chunksize=chunk))


def summarize(records: list[MetricRecord]) -> list[dict]:
    """Per-grid-point means, standard errors, theory values, and z-scores."""
    groups: dict[tuple, list[MetricRecord]] = {}
    for record in records:
        groups.setdefault((record.n, record.d, record.nu), []).append(record)
    rows = []
    for (n, d, nu), members in sorted(groups.items()):
        head = members[0]
        metrics = sorted(head.empirical)
        for metric in metrics:
            values = np.array([m.empirical[metric] for m in members], dtype=float)
            mean = float(values.mean())
            stderr = (
                float(values.std(ddof=1) / math.sqrt(len(values)))
                if len(values) > 1
                else 0.0
            )
            theory = None
            if head.theory is not None and metric in head.theory:
                theory = float(head.theory[metric])
            z_score = None
            if theory is not None and stderr > 0.0:
                z_score = (mean - theory) / stderr
            rows.append(
                {
                    "model": head.model,
                    "design": head.design,
                    "n": n,
                    "d": d,
                    "delta": head.delta,
                    "lambda": head.lam,
                    "nu": nu,
                    "L": head.L,
                    "kappa": head.kappa,
                    "metric": metric,
                    "replicates": len(members),
                    "empirical_mean": mean,
                    "empirical_stderr": stderr,
                    "theory": theory,
                    "z_score": z_score,
                }
            )
    return rows


def replicate_with(config: ExperimentConfig, **overrides) -> ExperimentConfig:
    """Copy an ExperimentConfig with field overrides (validation re-runs)."""
    return replace(config, **overrides)
