"""Adaptive quadrature for the tail integrals used by the bound constants.

Shared by the quadrature and bounds modules; the public, documented entry
point is bounds.gamma_integral.
"""

import math

from scipy.integrate import quad

# integrand values below this are treated as numerically zero
TRUNCATION_FLOOR = 1e-18


def _log_integrand(r, k, a):
    if r <= 0.0:
        return math.inf if k == 0 else -math.inf
    return k * math.log(r) - 0.25 * r * r + a * r


def _upper_cutoff(s, k, a):
    """Radius beyond which r^k e^(-r^2/4 + ar) stays below the floor."""
    hi = max(abs(s) + 1.0, 2.0 * abs(a) + 2.0 * math.sqrt(k + 1.0) + 4.0)
    while _log_integrand(hi, k, a) > math.log(TRUNCATION_FLOOR) - 2.0:
        hi *= 1.5
    return hi


def tail_integral(s, k, a):
    """integral_s^inf r^k e^(-r^2/4 + a r) dr by adaptive quadrature.

    Truncated where the integrand drops below 1e-18; relative target 1e-10.
    """
    if k < 0 or k != int(k):
        raise ValueError("moment order k must be a nonnegative integer")
    k = int(k)
    s = float(s)
    a = float(a)
    hi = _upper_cutoff(s, k, a)
    if s >= hi:
        return 0.0

    def f(r):
        return r ** k * math.exp(-0.25 * r * r + a * r)

    # split at the integrand's peak so quad sees smooth pieces
    peak = a + math.sqrt(a * a + 2.0 * k) if k > 0 else max(2.0 * a, 0.0)
    pieces = sorted({s, min(max(peak, s), hi), hi})
    total = 0.0
    for lo, up in zip(pieces[:-1], pieces[1:]):
        if up > lo:
            val, _ = quad(f, lo, up, epsabs=1e-300, epsrel=1e-10, limit=200)
            total += val
    return total
