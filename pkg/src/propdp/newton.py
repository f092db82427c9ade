"""Damped Newton iteration with multistart for small nonlinear systems.

The residual maps here are 2- or 3-dimensional and smooth; the Jacobian is
formed by central differences (relative step 1e-6) and each Newton step is
halved until the residual norm strictly decreases.  On failure the solver
restarts from 8 log-spaced seeds in [1e-2, 1e2]^k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NonConvergenceError

_JACOBIAN_REL_STEP = 1e-6
_MAX_HALVINGS = 40


@dataclass(frozen=True)
class NewtonResult:
    x: np.ndarray
    residual_norm: float
    iterations: int
    condition_number: float


def _jacobian(f, x: np.ndarray, fx: np.ndarray) -> np.ndarray:
    k = x.size
    J = np.empty((fx.size, k))
    for j in range(k):
        h = _JACOBIAN_REL_STEP * max(abs(x[j]), 1e-2)
        xp, xm = x.copy(), x.copy()
        xp[j] += h
        xm[j] -= h
        J[:, j] = (f(xp) - f(xm)) / (2.0 * h)
    return J


def damped_newton(f, x0, *, tol: float = 1e-11, max_iter: int = 200, positive: bool = True) -> NewtonResult:
    """Newton with halving line search; iterates stay strictly positive if asked."""
    x = np.asarray(x0, dtype=float).copy()
    fx = np.asarray(f(x), dtype=float)
    norm = float(np.linalg.norm(fx))
    cond = np.inf
    for it in range(max_iter):
        if norm <= tol:
            return NewtonResult(x, norm, it, cond)
        J = _jacobian(f, x, fx)
        cond = float(np.linalg.cond(J))
        try:
            step = np.linalg.solve(J, -fx)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(J, -fx, rcond=None)[0]
        scale = 1.0
        for _ in range(_MAX_HALVINGS):
            cand = x + scale * step
            if positive and np.any(cand <= 0):
                scale *= 0.5
                continue
            f_cand = np.asarray(f(cand), dtype=float)
            cand_norm = float(np.linalg.norm(f_cand))
            if np.isfinite(cand_norm) and cand_norm < norm:
                x, fx, norm = cand, f_cand, cand_norm
                break
            scale *= 0.5
        else:
            raise NonConvergenceError(
                f"newton: stalled at residual {norm:.3e}", last_iterate=x, residual=norm
            )
    if norm <= tol:
        return NewtonResult(x, norm, max_iter, cond)
    raise NonConvergenceError(
        f"newton: residual {norm:.3e} after {max_iter} iterations", last_iterate=x, residual=norm
    )


def multistart_seeds(k: int, count: int = 8) -> list[np.ndarray]:
    """Log-spaced diagonal seeds in [1e-2, 1e2]**k."""
    return [np.full(k, c) for c in np.geomspace(1e-2, 1e2, count)]


def solve_with_multistart(f, x0, *, tol: float = 1e-11, positive: bool = True) -> NewtonResult:
    """Try x0 first, then the log-spaced restart seeds; raise if all fail."""
    starts = [np.asarray(x0, dtype=float)] + multistart_seeds(len(x0))
    failure: NonConvergenceError | None = None
    for start in starts:
        try:
            return damped_newton(f, start, tol=tol, positive=positive)
        except NonConvergenceError as exc:
            if failure is None or (exc.residual or np.inf) < (failure.residual or np.inf):
                failure = exc
    assert failure is not None
    raise failure


def staggered_seeds(k: int, levels: int = 4) -> list[np.ndarray]:
    """Log-spaced cross-product seeds over [1e-2, 1e2]**k.

    Diagonal seeds alone cannot reach the off-diagonal roots of
    coordinate-symmetric systems (the Jacobian is singular on the diagonal
    and Newton stays confined to it), so enumeration also starts from
    every combination of per-coordinate levels.
    """
    axis = np.geomspace(1e-2, 1e2, levels)
    grids = np.meshgrid(*([axis] * k), indexing="ij")
    return list(np.stack([g.ravel() for g in grids], axis=1))


def enumerate_roots(f, x0, *, tol: float = 1e-11, positive: bool = True) -> list[NewtonResult]:
    """All distinct converged roots across the start set (1e-6 relative dedup).

    Starts from x0, the diagonal restart seeds, and the staggered
    cross-product seeds; non-converging starts are skipped.
    """
    starts = [np.asarray(x0, dtype=float)] + multistart_seeds(len(x0)) + staggered_seeds(len(x0))
    roots: list[NewtonResult] = []
    for start in starts:
        try:
            res = damped_newton(f, start, tol=tol, positive=positive)
        except NonConvergenceError:
            continue
        if not any(np.allclose(res.x, r.x, rtol=1e-6, atol=1e-9) for r in roots):
            roots.append(res)
    return roots
