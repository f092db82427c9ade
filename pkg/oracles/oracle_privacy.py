"""Independent privacy-accounting oracles via mpmath high precision.

zCDP of the tilted-objective mechanism at unit parameters, its RDP curve at
a few orders, and the output-perturbation delta at eps=0 (which reduces to
2 Phi(r/2) - 1 by symmetry of the hockey stick at eps=0... verified here
numerically as well).

Run:  python3 oracles/oracle_privacy.py
"""

import mpmath as mp

mp.mp.dps = 40


def phi_cdf(x):
    return 0.5 * (1 + mp.erf(x / mp.sqrt(2)))


def objective_zcdp(L, s, R, lam, nu):
    q = L * R / nu
    return mp.log(1 + s * R**2 / lam) + q**2 / 2 + mp.sqrt(2 / mp.pi) * q


def objective_rdp(alpha, L, s, R, lam, nu):
    q = L * R / nu
    t = alpha - 1
    return mp.log(1 + s * R**2 / lam) + q**2 / 2 + q**2 * t / 2 + mp.log(2 * phi_cdf(q * t)) / t


def hockey_stick(eps, r):
    return phi_cdf(r / 2 - eps / r) - mp.e**eps * phi_cdf(-r / 2 - eps / r)


if __name__ == "__main__":
    print("objective zCDP (1,1,1,1,1)      =", mp.nstr(objective_zcdp(1, 1, 1, 1, 1), 18))
    print("objective RDP alpha=2 unit      =", mp.nstr(objective_rdp(2, 1, 1, 1, 1, 1), 18))
    print("objective RDP alpha=1.5 unit    =", mp.nstr(objective_rdp(1.5, 1, 1, 1, 1, 1), 18))
    print("hockey_stick(eps=0, r=1)        =", mp.nstr(hockey_stick(0, 1), 18))
    print("   2*Phi(1/2)-1                 =", mp.nstr(2 * phi_cdf(0.5) - 1, 18))
    print("hockey_stick(eps=1, r=1)        =", mp.nstr(hockey_stick(1, 1), 18))
    print("output delta at eps=1, L/lam/nu=1:", mp.nstr(hockey_stick(1, 1), 18))
    # dpsgd zcdp linear in T: T * (L R)^2 / (2 nu^2)
    print("dpsgd zcdp T=7, LR=2, nu=0.5    =", mp.nstr(mp.mpf(7) * 4 / (2 * mp.mpf(0.25)), 18))
