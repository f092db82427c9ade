"""Independent one-step oracle for the noisy-GD error trace.

Direct derivation, no recursion: beta^1 = -gamma X^T c(0, X beta*) so, with
margin m = x.beta* ~ N(0, kappa^2) and eta = (iterate margin, signal margin)
= (0, m) at step 0,
    bias(1) = (gamma/delta) E[-c0(m) m]          (slope via Stein / direct quad)
    mse(1)  = (S01 - 1)^2 kappa^2 + gamma^2 nu^2 + (gamma^2/delta) E[c0(m)^2],
    S01     = bias(1)/kappa^2
where
    huber-CE:    c0(m) = E_eps[clip(-m - eps, L)]   (so -c0 m = m E[clip(m+eps,L)])
    logistic-CE: c0(m) = 1/2 - rho'(m)
All expectations by scipy.integrate.quad (nested for the huber inner mean).

Also prints the exact linear-case trace (L -> inf, eps = 0, labels y = X beta*):
    beta^t - beta* = (I - gamma S)^t (0 - beta*) - gamma nu sum (I-gamma S)^j xi
with S = X^T X, entries of X variance 1/d, d/n -> delta, via Marchenko-Pastur
moments  E S = 1/delta,  E S^2 = (1+delta)/delta^2,
         E S^3 = (1+3 delta+delta^2)/delta^3,
         E S^4 = (1+6 delta+6 delta^2+delta^3)/delta^4
(normalized traces of powers, d -> inf limit).

Run:  python3 oracles/oracle_state_evolution.py
"""

import math

import numpy as np
from scipy import integrate


def pdf(z, s=1.0):
    return math.exp(-0.5 * (z / s) ** 2) / (s * math.sqrt(2 * math.pi))


def clip(r, L):
    return min(L, max(-L, r))


def sigmoid(t):
    if t >= 0:
        return 1.0 / (1.0 + math.exp(-t))
    e = math.exp(t)
    return e / (1.0 + e)


def huber_ce_terms(kappa, s_eps, L):
    def inner_mean(x):
        # E_eps[clip(x + eps, L)]
        val, _ = integrate.quad(
            lambda e: clip(x + e, L) * pdf(e, s_eps), -10 * s_eps, 10 * s_eps, limit=200
        )
        return val

    ec2, _ = integrate.quad(
        lambda m: inner_mean(-m) ** 2 * pdf(m, kappa), -8 * kappa, 8 * kappa, limit=200
    )
    slope_num, _ = integrate.quad(
        lambda m: m * inner_mean(m) * pdf(m, kappa), -8 * kappa, 8 * kappa, limit=200
    )
    return ec2, slope_num  # E[c0^2], E[-c0(m) m] = E[m E_eps[clip(m+eps,L)]]


def logistic_ce_terms(kappa):
    ec2, _ = integrate.quad(
        lambda m: (0.5 - sigmoid(m)) ** 2 * pdf(m, kappa), -8 * kappa, 8 * kappa, limit=200
    )
    slope_num, _ = integrate.quad(
        lambda m: m * (sigmoid(m) - 0.5) * pdf(m, kappa), -8 * kappa, 8 * kappa, limit=200
    )
    return ec2, slope_num


def step_one(gamma, delta, nu, kappa, ec2, slope_num):
    bias = (gamma / delta) * slope_num
    s01 = bias / kappa**2
    mse = (s01 - 1.0) ** 2 * kappa**2 + gamma**2 * nu**2 + (gamma**2 / delta) * ec2
    return bias, mse


def linear_exact(gamma, delta, kappa, nu, T):
    m = {
        0: 1.0,
        1: 1.0 / delta,
        2: (1.0 + delta) / delta**2,
        3: (1.0 + 3.0 * delta + delta**2) / delta**3,
        4: (1.0 + 6.0 * delta + 6.0 * delta**2 + delta**3) / delta**4,
        5: (1.0 + 10.0 * delta + 20.0 * delta**2 + 10.0 * delta**3 + delta**4) / delta**5,
        6: (1.0 + 15.0 * delta + 50.0 * delta**2 + 50.0 * delta**3 + 15.0 * delta**4 + delta**5) / delta**6,
    }

    def poly_moment(p):
        return sum(c * m[k] for k, c in enumerate(p.coefficients[::-1]))

    one_minus = np.poly1d([-gamma, 1.0])  # 1 - gamma s
    out = []
    for t in range(T + 1):
        signal_term = kappa**2 * poly_moment(one_minus**(2 * t))
        xi_term = sum(
            gamma**2 * nu**2 * poly_moment(one_minus**(2 * j)) for j in range(t)
        )
        out.append(float(signal_term + xi_term))
    return out


if __name__ == "__main__":
    gamma, delta, nu, kappa = 0.5 / 1.5, 0.5, 0.1, 1.0
    ec2, slope = huber_ce_terms(1.0, 0.2, 10.0)
    print("huber-CE  E[c0^2] =", ec2, " E[-c0 m] =", slope)
    for nn in (0.0, nu):
        b, ms = step_one(gamma, delta, nn, kappa, ec2, slope)
        print(f"huber-CE   nu={nn}: bias(1) = {b!r}  mse(1) = {ms!r}")
    ec2l, slopel = logistic_ce_terms(1.0)
    print("logistic-CE  E[c0^2] =", ec2l, " E[-c0 m] =", slopel)
    for nn in (0.0, nu):
        b, ms = step_one(gamma, delta, nn, kappa, ec2l, slopel)
        print(f"logistic-CE nu={nn}: bias(1) = {b!r}  mse(1) = {ms!r}")
    print("linear exact mse(0..3) gamma=0.5 delta=0.5 nu=0:   ",
          linear_exact(0.5, 0.5, 1.0, 0.0, 3))
    print("linear exact mse(0..3) gamma=1/3 delta=0.5 nu=0.1: ",
          linear_exact(1.0 / 3.0, 0.5, 1.0, 0.1, 3))
