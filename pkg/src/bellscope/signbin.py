"""Sign-binned homodyne Bell tests on photon-number-correlated states.

The states are sum_r c_r |r>|r>...|r> over m modes with real c_r.  Party t
measures one of two quadratures X(theta_t), X(theta_t') and the continuous
outcome is binned to +/-1 by its sign.  The binned statistics reduce to
half-line integrals of Hermite-polynomial products:

    int_0^inf e^{-x^2} H_r H_s dx = pi 2^{r+s} [F(r,s) - F(s,r)] / (r - s),
    1/F(r,s) = Gamma((1-r)/2) Gamma(-s/2),            for r != s,
    int_0^inf e^{-x^2} H_r^2 dx  = 2^{r-1} r! sqrt(pi).

Everything downstream (correlators, Bell factors, the optimal-state
eigenproblem) is assembled from the g coefficients

    g_{r,s}(phi, m) = (pi 2^{r+s} / (r! s!))^{m/2}
                      ([F(r,s) - F(s,r)] / (r - s))^m cos(phi (r - s)),

whose prefactor and bracket span hundreds of orders of magnitude and are
therefore multiplied in signed-log form.  phi is always the sum of the
chosen angles over all parties.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .mk import expand_mk
from .numerics import LogSignedReal, max_eigenpair, rgamma_log

__all__ = [
    "FockCorrelatedState",
    "AngleSettings",
    "hermite_halfline_overlap",
    "g_rs",
    "correlator_E",
    "outcome_probability",
    "outcome_sign",
    "ghz_like_angles",
    "chsh_angles",
    "default_optimizer_angles",
    "bell_factor_sign",
    "bell_matrix",
    "optimize_state",
    "ConvergedOptimum",
    "converged_optimum",
]


@dataclass(frozen=True)
class FockCorrelatedState:
    """sum_r c_r |r>^(x m) with real coefficients and unit norm."""

    m: int
    coefficients: np.ndarray

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("mode count must be >= 1")
        coeffs = np.array(self.coefficients, dtype=float)
        if coeffs.ndim != 1 or coeffs.size < 1:
            raise ValueError("coefficients must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(coeffs)):
            raise ValueError("coefficients must be finite")
        norm_sq = float(coeffs @ coeffs)
        if abs(norm_sq - 1.0) > 1e-12:
            raise ValueError(f"coefficients not normalized: sum c_r^2 = {norm_sq!r}")
        coeffs.flags.writeable = False
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def dimension(self) -> int:
        return self.coefficients.size

    @classmethod
    def ghz(cls, m: int) -> "FockCorrelatedState":
        """(|0...0> + |1...1>)/sqrt(2)."""
        return cls(m, np.array([1.0, 1.0]) / math.sqrt(2.0))


@dataclass(frozen=True)
class AngleSettings:
    """Per-party quadrature angles (theta_t, theta_t'), in radians."""

    theta: tuple
    theta_prime: tuple

    def __post_init__(self):
        theta = tuple(float(t) for t in self.theta)
        prime = tuple(float(t) for t in self.theta_prime)
        if len(theta) != len(prime) or not theta:
            raise ValueError("theta and theta_prime must have equal nonzero length")
        if not all(math.isfinite(t) for t in theta + prime):
            raise ValueError("angles must be finite")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "theta_prime", prime)

    @property
    def m(self) -> int:
        return len(self.theta)

    def phi_sum(self, setting_tuple) -> float:
        """Sum of the chosen angle over all parties for one setting tuple."""
        return sum(
            self.theta_prime[t] if primed else self.theta[t]
            for t, primed in enumerate(setting_tuple)
        )


def _f_difference(r: int, s: int) -> LogSignedReal:
    """F(r,s) - F(s,r) with 1/F(r,s) = Gamma((1-r)/2) Gamma(-s/2).

    The Gamma poles kill one of the two terms for every integer pair, so the
    difference never needs a genuine signed-log subtraction.
    """
    fa = rgamma_log((1.0 - r) / 2.0) * rgamma_log(-s / 2.0)
    if fa.sign != 0:
        return fa
    fb = rgamma_log((1.0 - s) / 2.0) * rgamma_log(-r / 2.0)
    return -fb


def hermite_halfline_overlap(r: int, s: int) -> float:
    """int_0^inf e^{-x^2} H_r(x) H_s(x) dx in closed form."""
    if r < 0 or s < 0:
        raise ValueError("degrees must be >= 0")
    if r == s:
        return math.exp((r - 1) * math.log(2.0) + math.lgamma(r + 1)) * math.sqrt(math.pi)
    pref = LogSignedReal(math.log(math.pi) + (r + s) * math.log(2.0), 1)
    return (pref * _f_difference(r, s).scaled(1.0 / (r - s))).value()


@lru_cache(maxsize=None)
def _g_magnitude(r: int, s: int, m: int) -> LogSignedReal:
    """g_{r,s} without its cos(phi (r-s)) factor, in signed-log form."""
    pref_log = (
        math.log(math.pi)
        + (r + s) * math.log(2.0)
        - math.lgamma(r + 1)
        - math.lgamma(s + 1)
    )
    pref = LogSignedReal(pref_log, 1).power(m / 2.0)
    bracket = _f_difference(r, s).scaled(1.0 / (r - s))
    return pref * bracket.power(m)


def g_rs(r: int, s: int, phi: float, m: int) -> float:
    """The g coefficient for a (r, s) Fock pair; zero whenever r - s is even."""
    if not (r > s >= 0):
        raise ValueError("need r > s >= 0")
    if m < 1:
        raise ValueError("mode count must be >= 1")
    return _g_magnitude(r, s, m).value() * math.cos(phi * (r - s))


def _g_sum(state: FockCorrelatedState, phi: float) -> float:
    """2 sum_{r>s} c_r c_s g_{r,s}(phi, m)."""
    c = state.coefficients
    total = 0.0
    for r in range(1, c.size):
        if c[r] == 0.0:
            continue
        for s in range(1 - (r % 2), r, 2):  # opposite parity only
            if c[s] == 0.0:
                continue
            total += c[r] * c[s] * _g_magnitude(r, s, state.m).value() * math.cos(
                phi * (r - s)
            )
    return 2.0 * total


def correlator_E(state: FockCorrelatedState, phi: float) -> float:
    """Sign-binned full correlator E(phi, m) = 2^m * 2 sum_{r>s} c_r c_s g_{r,s}."""
    return (2.0 ** state.m) * _g_sum(state, phi)


def outcome_sign(outcome) -> int:
    """Product of the +/-1 entries of a binned outcome."""
    sign = 1
    for d in outcome:
        if d not in (1, -1):
            raise ValueError("binned outcomes are +/-1")
        sign *= d
    return sign


def outcome_probability(state: FockCorrelatedState, phi: float, outcome) -> float:
    """Probability of one binned outcome: 1/2^m + sign(outcome) * G(phi, m).

    All 2^m outcome probabilities sum to 1 by construction.  A value below
    -1e-12 cannot come from a state in this family and is reported as a
    diagnostic warning.
    """
    if len(outcome) != state.m:
        raise ValueError("outcome length must match the mode count")
    p = 2.0 ** (-state.m) + outcome_sign(outcome) * _g_sum(state, phi)
    if p < -1e-12 or p > 1.0 + 1e-12:
        warnings.warn(
            f"outcome probability {p!r} outside [0, 1]; the coefficient vector "
            "violates this formula's assumptions",
            RuntimeWarning,
            stacklevel=2,
        )
    return p


def ghz_like_angles(m: int) -> AngleSettings:
    """theta_k = (-1)^(m+1) pi (k-1) / (2m), primed angles shifted by pi/2."""
    if m < 2:
        raise ValueError("angle family defined for m >= 2")
    sign = 1.0 if m % 2 else -1.0
    theta = tuple(sign * math.pi * k / (2.0 * m) for k in range(m))
    return AngleSettings(theta, tuple(t + math.pi / 2.0 for t in theta))


def chsh_angles(phi: float = math.pi / 4.0) -> AngleSettings:
    """Two-party settings whose CHSH combination is 3 E(phi) - E(3 phi).

    The split of phi across the parties is fixed by theta_1 = 0.
    """
    return AngleSettings((0.0, phi), (-2.0 * phi, -phi))


def default_optimizer_angles(m: int) -> AngleSettings:
    """Angle family used by the state optimizer: the CHSH phi = pi/4 family
    for two parties, the GHZ-like family otherwise."""
    return chsh_angles() if m == 2 else ghz_like_angles(m)


def bell_factor_sign(state: FockCorrelatedState, angles: AngleSettings) -> float:
    """|<B_m>| for the state under sign binning at the given angles."""
    if angles.m != state.m:
        raise ValueError("state and angles disagree on the party count")
    expansion = expand_mk(state.m)
    total = sum(
        float(c) * correlator_E(state, angles.phi_sum(t))
        for t, c in expansion.terms.items()
    )
    return abs(total)


def bell_matrix(m: int, d: int, angles: AngleSettings) -> np.ndarray:
    """Symmetric matrix whose quadratic form in the coefficient vector gives
    <B_m>; entry (r, s) sums coefficient * 2^m * g_{r,s} over the expansion.

    The diagonal is exactly zero and so is every same-parity pair, which
    makes the matrix bipartite between even and odd Fock indices.
    """
    if d < 2:
        raise ValueError("truncation must be >= 2")
    if angles.m != m:
        raise ValueError("angles do not match the party count")
    expansion = expand_mk(m)
    tuples = [(float(c), angles.phi_sum(t)) for t, c in expansion.terms.items()]
    scale = 2.0 ** m
    matrix = np.zeros((d, d))
    for r in range(1, d):
        for s in range(1 - (r % 2), r, 2):
            base = _g_magnitude(r, s, m).value()
            if base == 0.0:
                continue
            acc = sum(c * math.cos(phi * (r - s)) for c, phi in tuples)
            matrix[r, s] = matrix[s, r] = scale * base * acc
    return matrix


def _parity_twin(v: np.ndarray) -> np.ndarray:
    """Flip the sign of the odd-index components.

    Because the Bell matrix couples only opposite parities, a vector and its
    parity twin reach the same |<B_m>|; they are the two physically
    equivalent optima.
    """
    twin = v.copy()
    twin[1::2] = -twin[1::2]
    return twin


def _canonical(v: np.ndarray) -> np.ndarray:
    for x in v:
        if abs(x) > 1e-12:
            return -v if x < 0 else v
    return v


def optimize_state(m: int, d: int, angles: AngleSettings, constraint=None):
    """State maximizing |<B_m>| at fixed angles over truncation d.

    Unconstrained this is the top-magnitude eigenpair of the Bell matrix;
    of the two parity-twin optima the one with the larger component sum is
    reported (ties keep the raw eigenvector).  With
    ``constraint="nonnegative"`` the quadratic form is maximized over the
    non-negative orthant instead.

    Returns (bell value, FockCorrelatedState).
    """
    matrix = bell_matrix(m, d, angles)
    if constraint is None:
        lam_pos, v_pos = max_eigenpair(matrix)
        lam_neg, v_neg = max_eigenpair(-matrix)
        lam, v = (lam_neg, v_neg) if lam_neg > lam_pos else (lam_pos, v_pos)
        v = _canonical(v)
        twin = _canonical(_parity_twin(v))
        if float(np.sum(twin)) > float(np.sum(v)) + 1e-12:
            v = twin
    elif constraint in ("nonnegative", "nonneg"):
        lam_pos, v_pos = max_eigenpair(matrix, constraint="nonnegative")
        lam_neg, v_neg = max_eigenpair(-matrix, constraint="nonnegative")
        lam, v = (lam_neg, v_neg) if lam_neg > lam_pos else (lam_pos, v_pos)
    else:
        raise ValueError(f"unknown constraint: {constraint!r}")
    v = v / np.linalg.norm(v)
    return lam, FockCorrelatedState(m, v)


class ConvergedOptimum(NamedTuple):
    bell: float
    state: FockCorrelatedState
    converged: bool
    delta: float


def converged_optimum(
    m: int,
    angles: AngleSettings,
    d: int = 60,
    d_step: int = 10,
    threshold: float = 5e-4,
    constraint=None,
) -> ConvergedOptimum:
    """Optimum at truncation d plus a convergence flag: the gain from the
    previous truncation (d - d_step) must stay below ``threshold``."""
    bell_lo, _ = optimize_state(m, d - d_step, angles, constraint=constraint)
    bell_hi, state = optimize_state(m, d, angles, constraint=constraint)
    delta = bell_hi - bell_lo
    return ConvergedOptimum(bell_hi, state, delta < threshold, delta)
