"""Independent oracles for proximal-operator test values.

Methods deliberately differ from the package implementation: golden-section
minimization of the prox objective for the Huber loss (the package uses the
clip identity) and plain bisection on the stationarity condition for the
logistic loss (the package uses safeguarded Newton).

Run:  python3 oracles/oracle_prox.py
"""

import math


def huber(r, L):
    a = abs(r)
    return 0.5 * r * r if a <= L else L * a - 0.5 * L * L


def golden_minimize(f, lo, hi, iters=200):
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - phi * (b - a), a + phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def prox_huber_oracle(s, tau, L):
    return golden_minimize(lambda y: 0.5 * (y - s) ** 2 + tau * huber(y, L), s - 10, s + 10)


def sigmoid(t):
    if t >= 0:
        return 1.0 / (1.0 + math.exp(-t))
    e = math.exp(t)
    return e / (1.0 + e)


def prox_logistic_oracle(x, gamma):
    # bisection on p + gamma*sigmoid(p) - x = 0 over the forced bracket [x-gamma, x]
    lo, hi = x - gamma, x
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid + gamma * sigmoid(mid) - x > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


if __name__ == "__main__":
    print("prox_huber(3, 1, 1)    =", prox_huber_oracle(3.0, 1.0, 1.0))
    print("prox_huber(0.5, 1, 1)  =", prox_huber_oracle(0.5, 1.0, 1.0))
    print("prox_logistic(0, 1)    =", prox_logistic_oracle(0.0, 1.0))
    lhs = prox_logistic_oracle(0.7 + 2.0, 2.0)
    rhs = -prox_logistic_oracle(-0.7, 2.0)
    print("prox(x+g,g) vs -prox(-x,g) at (0.7, 2):", lhs, rhs, "diff", lhs - rhs)
    p = prox_logistic_oracle(0.0, 1.0)
    rpp = sigmoid(p) * (1.0 - sigmoid(p))
    print("prox_logistic_derivative(0, 1) =", 1.0 / (1.0 + rpp))
    h = 1e-5
    fd = (prox_logistic_oracle(0.7 + h, 2.0) - prox_logistic_oracle(0.7 - h, 2.0)) / (2 * h)
    print("central-difference prox'(0.7, 2) =", fd)
    p2 = prox_logistic_oracle(0.7, 2.0)
    print("closed-form prox'(0.7, 2)        =", 1.0 / (1.0 + 2.0 * sigmoid(p2) * (1 - sigmoid(p2))))
