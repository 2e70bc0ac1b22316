"""Talagrand and log-Sobolev checks on cases with known answers.

Translated Gaussians saturate both inequalities at rho = 1/2: the squared
transport distance equals |m|^2 and four times the relative entropy, and
the entropy matches the Fisher information over 2 rho to grid precision.
Half-space doubling gives a non-equality case whose entropy is log 2 on
the nose.
"""

import math

import numpy as np

from shrinker_ot import (
    check_lsi,
    check_talagrand,
    discretize_gaussian,
    make_model,
    reweight,
)


def shift_ratio(m):
    def ratio(P):
        return np.exp((2.0 * P[:, 0] * m - m * m) / 4.0)
    return ratio


def main():
    print("Talagrand on translated 1-D Gaussians:")
    model = make_model("gaussian", 1)
    for m in (0.5, 1.0, 2.0):
        rep = check_talagrand(model, shift_ratio(m))
        print(f"  shift {m}: W^2={rep.lhs:.6f} (exact {m * m}), "
              f"4H={rep.rhs:.6f}, passed={rep.passed}")
    print()

    print("Talagrand on the doubled half-space over the 3-sphere:")
    sphere = make_model("sphere", 3)
    rep = check_talagrand(sphere, lambda P: 2.0 * (P[:, 0] >= 0.0))
    h = rep.constants["relative_entropy"]
    print(f"  H={h:.12f} (log 2 = {math.log(2.0):.12f}), "
          f"W^2={rep.lhs:.6f} <= {rep.rhs:.6f}, passed={rep.passed}")
    print()

    print("log-Sobolev equality on the shifted family (d=1):")
    nu = discretize_gaussian(1, 64).normalized()
    for m in (0.7, 2.0):
        eta = reweight(nu, shift_ratio(m))
        rep = check_lsi(eta, nu, grad_log_ratio=lambda P: np.full_like(
            P, m / 2.0))
        print(f"  shift {m}: H={rep.lhs:.12f} I/(2rho)={rep.rhs:.12f} "
              f"gap={abs(rep.lhs - rep.rhs):.2e}")
    print()

    print("log-Sobolev on a non-linear reweighting (strict inequality):")
    nu2 = discretize_gaussian(2, 32).normalized()
    beta = 0.1
    eta2 = reweight(nu2, lambda P: np.exp(-beta * np.sum(P * P, axis=1)))
    rep = check_lsi(eta2, nu2, grad_log_ratio=lambda P: -2.0 * beta * P)
    print(f"  H={rep.lhs:.9f} < I/(2rho)={rep.rhs:.9f}, "
          f"slack {rep.rhs - rep.lhs:.6f}, passed={rep.passed}")


if __name__ == "__main__":
    main()
