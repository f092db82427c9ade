"""Scalar calculus shared by every other module.

Huber and logistic losses, the clip operator, proximal operators, standard
Gaussian special functions, and closed-form moments of clipped Gaussians.
All functions are numpy ufunc-style: they accept scalars or arrays and
broadcast. Scale parameters equal to zero degenerate to the identity /
indicator limits.
"""

from __future__ import annotations

import numpy as np
from scipy.special import erfc

from .errors import NumericError

_SQRT2 = np.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def _check_finite(name: str, *values) -> None:
    for v in values:
        if not np.all(np.isfinite(v)):
            raise ValueError(f"{name}: non-finite input")


def huber(r, L):
    """Huber loss: r**2/2 inside [-L, L], L*|r| - L**2/2 outside."""
    _check_finite("huber", r, L)
    r = np.asarray(r, dtype=float)
    a = np.abs(r)
    return np.where(a <= L, 0.5 * r * r, L * a - 0.5 * L * L)


def clip(r, L):
    """Clip to [-L, L]; the derivative of the Huber loss."""
    _check_finite("clip", r, L)
    return np.clip(np.asarray(r, dtype=float), -L, L)


def prox_huber(s, tau, L):
    """prox of tau * Huber_L: minimizes 0.5*(y-s)**2 + tau*H_L(y).

    Uses the identity s - prox(s) = tau * clip(s / (1 + tau), L).
    """
    s = np.asarray(s, dtype=float)
    return s - tau * clip(s / (1.0 + tau), L)


def logistic_rho(t):
    """Softplus log(1 + exp(t)), stable for |t| up to the float range."""
    t = np.asarray(t, dtype=float)
    return np.maximum(t, 0.0) + np.log1p(np.exp(-np.abs(t)))


def logistic_rho_prime(t):
    """Sigmoid 1/(1 + exp(-t)), evaluated on the non-overflowing branch."""
    t = np.asarray(t, dtype=float)
    p = 1.0 / (1.0 + np.exp(-np.abs(t)))  # sigmoid(|t|) in [0.5, 1)
    return np.where(t >= 0, p, 1.0 - p)


def logistic_rho_second(t):
    """Sigmoid derivative rho'(t) * (1 - rho'(t)) in (0, 1/4]."""
    p = logistic_rho_prime(t)
    return p * (1.0 - p)


def prox_logistic(x, gamma, tol=1e-12, max_iter=200):
    """Unique p solving p + gamma * rho'(p) = x (gamma >= 0).

    Safeguarded Newton started at x - gamma*rho'(x), with the bracket
    [x - gamma, x] forced by 0 <= gamma*rho'(p) <= gamma; bisection fallback
    whenever a Newton step leaves the bracket.
    """
    if gamma < 0:
        raise ValueError("prox_logistic: gamma must be >= 0")
    x = np.asarray(x, dtype=float)
    _check_finite("prox_logistic", x)
    if gamma == 0.0:
        return x + 0.0
    lo = x - gamma
    hi = x + np.zeros_like(x)
    p = x - gamma * logistic_rho_prime(x)
    for _ in range(max_iter):
        g = p + gamma * logistic_rho_prime(p) - x
        if np.all(np.abs(g) <= tol):
            break
        lo = np.where(g < 0, p, lo)
        hi = np.where(g > 0, p, hi)
        step = g / (1.0 + gamma * logistic_rho_second(p))
        cand = p - step
        inside = (cand > lo) & (cand < hi)
        p = np.where(inside, cand, 0.5 * (lo + hi))
    else:
        worst = float(np.max(np.abs(p + gamma * logistic_rho_prime(p) - x)))
        if worst > tol:
            raise NumericError(f"prox_logistic: no convergence, residual {worst:.3e}")
    return p


def prox_logistic_derivative(x, gamma):
    """Derivative of prox_logistic in x: 1/(1 + gamma*rho''(prox))."""
    if gamma == 0.0:
        return np.ones_like(np.asarray(x, dtype=float))
    p = prox_logistic(x, gamma)
    return 1.0 / (1.0 + gamma * logistic_rho_second(p))


def gaussian_pdf(x):
    """Standard normal density."""
    x = np.asarray(x, dtype=float)
    return _INV_SQRT_2PI * np.exp(-0.5 * x * x)


def gaussian_cdf(x):
    """Standard normal CDF via the complementary error function."""
    x = np.asarray(x, dtype=float)
    return 0.5 * erfc(-x / _SQRT2)


def interval_probability(mu, s, L):
    """P(|mu + s*Z| < L) for Z ~ N(0,1); s = 0 gives the indicator."""
    mu = np.asarray(mu, dtype=float)
    s = np.asarray(s, dtype=float)
    safe = np.where(s > 0, s, 1.0)
    gaussian = gaussian_cdf((L - mu) / safe) - gaussian_cdf((-L - mu) / safe)
    return np.where(s > 0, gaussian, (np.abs(mu) < L).astype(float))


def clipped_mean(mu, s, L):
    """E[clip(mu + s*Z, L)] for Z ~ N(0,1); s = 0 gives clip(mu, L)."""
    mu = np.asarray(mu, dtype=float)
    s = np.asarray(s, dtype=float)
    safe = np.where(s > 0, s, 1.0)
    a = (-L - mu) / safe
    b = (L - mu) / safe
    pa, pb = gaussian_cdf(a), gaussian_cdf(b)
    val = mu * (pb - pa) - safe * (gaussian_pdf(b) - gaussian_pdf(a)) - L * pa + L * (1.0 - pb)
    return np.where(s > 0, val, clip(mu, L))


def clipped_second_moment(mu, s, L):
    """E[clip(mu + s*Z, L)**2] for Z ~ N(0,1); s = 0 gives clip(mu, L)**2."""
    mu = np.asarray(mu, dtype=float)
    s = np.asarray(s, dtype=float)
    safe = np.where(s > 0, s, 1.0)
    # cap the standardized bounds: a subnormal s overflows the division to
    # +/-inf and the a*pdf(a) products below would become inf*0 = nan; the
    # pdf/cdf factors already saturate by |z| ~ 40, so capping is exact,
    # and 1e150 keeps x*x inside the pdf finite as well
    with np.errstate(over="ignore"):
        a = np.clip((-L - mu) / safe, -1e150, 1e150)
        b = np.clip((L - mu) / safe, -1e150, 1e150)
    pa, pb = gaussian_cdf(a), gaussian_cdf(b)
    fa, fb = gaussian_pdf(a), gaussian_pdf(b)
    val = (
        (mu * mu + safe * safe) * (pb - pa)
        + 2.0 * mu * safe * (fa - fb)
        + safe * safe * (a * fa - b * fb)
        + L * L * (pa + 1.0 - pb)
    )
    return np.where(s > 0, val, clip(mu, L) ** 2)


def expected_huber(mu, s, L):
    """E[H_L(mu + s*Z)] for Z ~ N(0,1); s = 0 gives H_L(mu).

    Uses H_L(v) = clip(v, L)**2 / 2 + L*(v - L)_+ + L*(-v - L)_+, whose
    Gaussian expectation is closed-form; each positive part contributes
    E[(a + s*Z)_+] = s*pdf(a/s) + a*cdf(a/s).
    """
    mu = np.asarray(mu, dtype=float)
    s = np.asarray(s, dtype=float)
    safe = np.where(s > 0, s, 1.0)
    up = (mu - L) / safe
    dn = (-mu - L) / safe
    tails = (
        safe * (gaussian_pdf(up) + gaussian_pdf(dn))
        + (mu - L) * gaussian_cdf(up)
        + (-mu - L) * gaussian_cdf(dn)
    )
    val = 0.5 * clipped_second_moment(mu, safe, L) + L * tails
    return np.where(s > 0, val, huber(mu, L))


def truncated_second_moment(s, L):
    """E[clip(s*Z, L)**2] for Z ~ N(0,1), in closed form; s = 0 gives 0."""
    s = np.asarray(s, dtype=float)
    if np.any(s < 0):
        raise ValueError("truncated_second_moment: s must be >= 0")
    safe = np.where(s > 0, s, 1.0)
    r = L / safe
    val = safe * safe * (2.0 * gaussian_cdf(r) - 1.0) - 2.0 * safe * L * gaussian_pdf(r) + 2.0 * L * L * (
        1.0 - gaussian_cdf(r)
    )
    return np.where(s > 0, val, 0.0)
