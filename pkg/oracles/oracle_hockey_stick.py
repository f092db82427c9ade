"""Independent hockey-stick divergence oracle.

Computes integral max(0, p(x) - e^eps q(x)) dx numerically for p = N(r, 1),
q = N(0, 1) with scipy.integrate.quad, splitting at the crossing point
x* = eps/r + r/2 where the integrand's kink sits.

Run:  python3 oracles/oracle_hockey_stick.py
"""

import math

from scipy import integrate


def pdf(x, mu=0.0):
    return math.exp(-0.5 * (x - mu) ** 2) / math.sqrt(2 * math.pi)


def numeric_delta(eps, r):
    cross = eps / r + r / 2.0
    val, err = integrate.quad(
        lambda x: max(0.0, pdf(x, r) - math.exp(eps) * pdf(x)),
        cross - 1e-12,
        cross + 40.0,
        limit=500,
    )
    return val, err


if __name__ == "__main__":
    for eps, r in [(0.0, 1.0), (1.0, 1.0), (1.0, 2.0), (2.0, 0.5), (0.5, 3.0), (4.0, 1.0)]:
        v, e = numeric_delta(eps, r)
        print(f"delta(eps={eps}, ratio={r}) = {v!r}  quaderr {e:.2e}")
