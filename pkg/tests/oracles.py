"""Quadrature-based oracles shared between test modules.

These deliberately avoid the closed forms they are used to check: joint
probabilities come from direct numerical integration of the Hermite-Gaussian
density, not from the Gamma-function identities.
"""

import math

import numpy as np

from bellscope.numerics import hermite_eval, integrate_1d


def quadrature_halfline(r, s, tol=1e-12):
    return integrate_1d(
        lambda x: np.exp(-x * x) * hermite_eval(r, x) * hermite_eval(s, x),
        0.0,
        math.inf,
        tol=tol,
    )


def quadrature_halfline_window(r, s, width, rel=1e-11):
    """Half-line Hermite integral on a finite window with a scale-relative
    tolerance, usable at large degrees where the value is astronomically big."""
    probe = integrate_1d(
        lambda x: np.exp(-x * x) * hermite_eval(r, x) * hermite_eval(s, x),
        0.0,
        width,
        tol=1.0,
        max_intervals=20000,
    )
    return integrate_1d(
        lambda x: np.exp(-x * x) * hermite_eval(r, x) * hermite_eval(s, x),
        0.0,
        width,
        tol=abs(probe) * rel + 1e-300,
        max_intervals=20000,
    )


def oracle_probability(state, phi, outcome, tol=1e-12):
    """Binned outcome probability by direct quadrature of the joint-density
    series over orthant domains."""
    m, c = state.m, state.coefficients
    total = 0.0
    for r in range(c.size):
        for s in range(c.size):
            if c[r] == 0.0 or c[s] == 0.0:
                continue
            prod = 1.0
            for d_t in outcome:
                lo, hi = (0.0, 12.0) if d_t == 1 else (-12.0, 0.0)
                prod *= integrate_1d(
                    lambda x, r=r, s=s: np.exp(-x * x)
                    * hermite_eval(r, x)
                    * hermite_eval(s, x),
                    lo,
                    hi,
                    tol=tol,
                )
            log_norm = 0.5 * m * (
                math.log(math.pi)
                + (r + s) * math.log(2.0)
                + math.lgamma(r + 1)
                + math.lgamma(s + 1)
            )
            total += c[r] * c[s] * math.cos(phi * (r - s)) * prod * math.exp(-log_norm)
    return total
