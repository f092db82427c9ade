"""Independent oracles for Gaussian special functions and clipped moments.

Phi via mpmath's arbitrary-precision erf; clipped/truncated moments via both
scipy.integrate.quad and a 10^7-draw Monte Carlo (numpy default_rng, a
different generator than the package's Philox streams).

Run:  python3 oracles/oracle_gaussian_moments.py
"""

import math

import mpmath as mp
import numpy as np
from scipy import integrate

mp.mp.dps = 40


def phi_cdf_mp(x):
    return 0.5 * (1 + mp.erf(x / mp.sqrt(2)))


def clip(r, L):
    return min(L, max(-L, r))


def pdf(x):
    return math.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)


def quad_moment(fn, lo=-12.0, hi=12.0):
    val, err = integrate.quad(lambda z: fn(z) * pdf(z), lo, hi, limit=400)
    return val, err


if __name__ == "__main__":
    print("Phi(1) =", mp.nstr(phi_cdf_mp(1), 20))
    print("2*Phi(1)-1 =", mp.nstr(2 * phi_cdf_mp(1) - 1, 20))

    v, e = quad_moment(lambda z: clip(z, 1.0) ** 2)
    print("E[clip(Z,1)^2] quad =", v, "+-", e)
    v, e = quad_moment(lambda z: clip(0.5 + z, 1.0))
    print("E[clip(0.5+Z,1)] quad =", v, "+-", e)

    rng = np.random.default_rng(987654321)
    z = rng.standard_normal(10_000_000)
    c2 = np.clip(z, -1, 1) ** 2
    print("E[clip(Z,1)^2] MC =", c2.mean(), "stderr", c2.std(ddof=1) / math.sqrt(z.size))
    cm = np.clip(0.5 + z, -1, 1)
    print("E[clip(0.5+Z,1)] MC =", cm.mean(), "stderr", cm.std(ddof=1) / math.sqrt(z.size))
