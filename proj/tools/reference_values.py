#!/usr/bin/env python3
"""Reference values for the numerics and rate tests, at 50 digits."""

import mpmath as mp

mp.mp.dps = 50
LOG2E = 1 / mp.log(2)


def q(x):
    return mp.erfc(x / mp.sqrt(2)) / 2


def q_inv(eps):
    return mp.findroot(lambda x: q(x) - eps, 0)


def dispersion(g):
    return LOG2E**2 * (1 - (1 + g) ** -2)


def fbl_rate(g, eps, m_d):
    return mp.log(1 + g, 2) - q_inv(eps) * mp.sqrt(dispersion(g) / m_d)


def main():
    rows = [
        ("Q(2)", q(2)),
        ("Q(1.3)", q(mp.mpf("1.3"))),
        ("Qinv(0.0227501)", q_inv(mp.mpf("0.0227501"))),
        ("Qinv(1e-5)", q_inv(mp.mpf("1e-5"))),
        ("V(1)", dispersion(1)),
        ("V(1e12)", dispersion(mp.mpf("1e12"))),
        ("R(10, 1e-5, 100)", fbl_rate(10, mp.mpf("1e-5"), 100)),
        ("R(10, 1e-5, 128)", fbl_rate(10, mp.mpf("1e-5"), 128)),
    ]
    for name, value in rows:
        print(f"{name:20s} {mp.nstr(value, 17)}")


if __name__ == "__main__":
    main()
