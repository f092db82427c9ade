"""Gaussian quadrature rules, cached by node count.

Gauss-Hermite rules are transformed so that sum(w * f(z)) approximates
E[f(Z)] for Z ~ N(0,1): z = sqrt(2) * x_hermite and w = w_hermite / sqrt(pi).
A plain Gauss-Legendre rule on (-1, 1) is exposed for panel integration of
integrands with known kink locations.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_hermite

from .laws import ScalarLaw

DEFAULT_NODES_1D = 120
DEFAULT_NODES_2D = 80


@lru_cache(maxsize=32)
def standard_normal_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights integrating against the N(0,1) density.

    scipy's Hermite roots stay numerically stable at high node counts where
    the numpy recurrence overflows.
    """
    x, w = roots_hermite(n)
    z = np.sqrt(2.0) * x
    w = w / np.sqrt(np.pi)
    z.setflags(write=False)
    w.setflags(write=False)
    return z, w


def expect(fn, n: int = DEFAULT_NODES_1D) -> float:
    """E[fn(Z)] for Z ~ N(0,1)."""
    z, w = standard_normal_rule(n)
    return float(np.dot(w, fn(z)))


@lru_cache(maxsize=64)
def legendre_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on (-1, 1)."""
    x, w = leggauss(n)
    for arr in (x, w):
        arr.setflags(write=False)
    return x, w


@lru_cache(maxsize=8)
def standard_normal_rule_2d(n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Flattened tensor rule for two independent N(0,1) variables."""
    z, w = standard_normal_rule(n)
    z1 = np.repeat(z, n)
    z2 = np.tile(z, n)
    ww = np.outer(w, w).ravel()
    for arr in (z1, z2, ww):
        arr.setflags(write=False)
    return z1, z2, ww


def expect2d(fn, n: int = DEFAULT_NODES_2D) -> float:
    """E[fn(Z1, Z2)] for independent standard normals."""
    z1, z2, w = standard_normal_rule_2d(n)
    return float(np.dot(w, fn(z1, z2)))


def law_expect(fn, law: ScalarLaw, n: int = DEFAULT_NODES_1D) -> float:
    """E[fn(X)] for X ~ law, exact over point masses, GH over Gaussians."""
    z, w = standard_normal_rule(n)
    total = 0.0
    for weight, loc, scale in zip(law.weights, law.locs, law.scales):
        if scale == 0.0:
            total += weight * float(np.asarray(fn(np.asarray([loc])))[0])
        else:
            total += weight * float(np.dot(w, fn(loc + scale * z)))
    return total
