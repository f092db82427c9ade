"""Independent solve of the robust-regression fixed-point system.

Damped Picard iteration on (sigma, tau) with all expectations computed by
scipy.integrate.quad (no closed-form clipped moments, no Gauss-Hermite, no
Newton) — an entirely different route than the package solver.

System, with kappa^2 = E[signal^2] and the noise eps ~ N(0, s_eps^2):
    J2(sigma, tau) = E[ clip((sigma Z + eps)/(1+tau), L)^2 ]
    P(sigma, tau)  = Pr[ |(sigma Z + eps)/(1+tau)| < L ]
    sigma^2 = tau^2 (J2/delta + lam^2 kappa^2 + nu^2)
    tau     = (delta - tau/(1+tau) P) / (lam delta)

Also solves the 1-D ridge reduction (L -> infinity, Gaussian everything)
by bisection for the closed-form cross-check.

Run:  python3 oracles/oracle_huber_system.py
"""

import math

from scipy import integrate


def pdf(z):
    return math.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)


def clip(r, L):
    return min(L, max(-L, r))


def solve(delta, lam, nu, L, kappa, s_eps, iters=400, damping=0.5):
    sigma, tau = 1.0, 0.5
    for _ in range(iters):
        scale = math.hypot(sigma, s_eps)

        def j2_f(z):
            return clip(scale * z / (1.0 + tau), L) ** 2 * pdf(z)

        def p_f(z):
            return (abs(scale * z / (1.0 + tau)) < L) * pdf(z)

        j2, _ = integrate.quad(j2_f, -12, 12, limit=400)
        p, _ = integrate.quad(p_f, -12, 12, limit=400, points=[-L * (1 + tau) / scale, L * (1 + tau) / scale])
        sigma_new = tau * math.sqrt(j2 / delta + lam**2 * kappa**2 + nu**2)
        tau_new = (delta - tau / (1.0 + tau) * p) / (lam * delta)
        sigma = (1 - damping) * sigma + damping * sigma_new
        tau = (1 - damping) * tau + damping * tau_new
    return sigma, tau


def ridge_tau(delta, lam):
    # tau = (delta - tau/(1+tau)) / (lam delta), bisection on f(tau)
    def f(tau):
        return lam * delta * tau - delta + tau / (1.0 + tau)

    lo, hi = 1e-12, 1e6
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


if __name__ == "__main__":
    s, t = solve(0.5, 1.0, 0.2, 10.0, 1.0, 0.2)
    print("general point delta=0.5 lam=1 nu=0.2 L=10 s_eps=0.2:")
    print("  sigma* =", s, " tau* =", t)
    print("  mse =", s * s, " bias =", 1 - t, " xi_corr =", -t * 0.2)

    s0, t0 = solve(2.0, 0.3, 0.0, 1.0, 1.0, 0.5)
    print("second point delta=2 lam=0.3 nu=0 L=1 s_eps=0.5:")
    print("  sigma* =", s0, " tau* =", t0)

    tau = ridge_tau(0.5, 1.0)
    print("ridge tau(delta=0.5, lam=1) =", tau, " (expect sqrt(2)-1 =", math.sqrt(2) - 1, ")")
