"""Independent solve of the logistic fixed-point system.

Damped Picard iteration on (alpha, sigma, gamma); expectations by nested
scipy.integrate.quad over the two Gaussian coordinates; the prox by brentq
root finding.  No Gauss-Hermite grids, no Newton, no shared code with the
package.

System (kappa fixed, nu allowed):
    E1 = E[ 2 rho'(-k Z1) rho'(prox_{g rho}(k a Z1 + s Z2))^2 ]
    E2 = E[ 2 rho''(-k Z1) prox_{g rho}(k a Z1 + s Z2) ]
    E3 = E[ 2 rho'(-k Z1) / (1 + g rho''(prox_{g rho}(k a Z1 + s Z2))) ]
    s^2 = g^2 (E1/delta + nu^2);  a = -E2/delta;  g = (delta - 1 + E3)/(lam delta)

Run:  python3 oracles/oracle_logistic_system.py   (takes ~1 minute)
"""

import math

from scipy import integrate, optimize


def pdf(z):
    return math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)


def sigmoid(t):
    if t >= 0:
        return 1.0 / (1.0 + math.exp(-t))
    e = math.exp(t)
    return e / (1.0 + e)


def rho2(t):
    s = sigmoid(t)
    return s * (1.0 - s)


def prox(x, gamma):
    if gamma == 0:
        return x
    return optimize.brentq(lambda p: p + gamma * sigmoid(p) - x, x - gamma, x, xtol=1e-14)


def expectations(alpha, sigma, gamma, kappa, delta):
    def make(fn):
        def outer(z1):
            inner, _ = integrate.quad(
                lambda z2: fn(z1, z2) * pdf(z2), -8, 8, limit=200
            )
            return inner * pdf(z1)

        val, _ = integrate.quad(outer, -8, 8, limit=200)
        return val

    def e1(z1, z2):
        p = prox(kappa * alpha * z1 + sigma * z2, gamma)
        return 2.0 * sigmoid(-kappa * z1) * sigmoid(p) ** 2

    def e2(z1, z2):
        p = prox(kappa * alpha * z1 + sigma * z2, gamma)
        return 2.0 * rho2(-kappa * z1) * p

    def e3(z1, z2):
        p = prox(kappa * alpha * z1 + sigma * z2, gamma)
        return 2.0 * sigmoid(-kappa * z1) / (1.0 + gamma * rho2(p))

    return make(e1), make(e2), make(e3)


def solve(delta, lam, nu, kappa, iters=60, damping=0.6):
    alpha, sigma, gamma = 0.5, kappa, 0.5
    for i in range(iters):
        E1, E2, E3 = expectations(alpha, sigma, gamma, kappa, delta)
        sigma_new = gamma * math.sqrt(E1 / delta + nu**2)
        alpha_new = -E2 / delta
        gamma_new = (delta - 1.0 + E3) / (lam * delta)
        alpha = (1 - damping) * alpha + damping * alpha_new
        sigma = (1 - damping) * sigma + damping * sigma_new
        gamma = (1 - damping) * gamma + damping * gamma_new
    return alpha, sigma, gamma


if __name__ == "__main__":
    a, s, g = solve(2.0, 1.0, 0.0, 1.0)
    print("delta=2 lam=1 nu=0 kappa=1:  alpha* =", a, " sigma* =", s, " gamma* =", g)
    a2, s2, g2 = solve(0.5, 1.0, 0.2, 1.0)
    print("delta=0.5 lam=1 nu=0.2 kappa=1:  alpha* =", a2, " sigma* =", s2, " gamma* =", g2)
