"""Root-binned homodyne Bell tests built on an even/odd function pair.

The states are (|f>^(x m) + e^{i theta} |g>^(x m)) / sqrt(2) with f real and
even, g real and odd, both unit norm.  f has a real even Fourier transform
f~; g's Fourier transform is i h~ with h~ real and odd.  Each party measures
X or P and the outcome is binned by the sign of f*g (for X) or f~*h~ (for
P); the partitions are known from the roots of those products, hence "root
binning".

The correlator then depends only on how many parties measured X:

    E(k, m-k) = V^k W^(m-k) cos[theta + (m-k) pi/2],
    V = int |f g| dx,   W = int |f~ h~| dp,

and the Bell factor follows from the Mermin-Klyshko expansion.  V = W = 1
with theta = (1-m) pi/4 saturates the quantum bound 2^((m+1)/2).

The module also evaluates Bell factors by direct domain integration for
finite superpositions of products of coherent states, which covers the
three-mode coherent-superposition candidate state and serves as the
independent cross-check of the closed-form correlator.

Wavefunction convention: <x|n> ~ H_n(x) e^{-x^2/2}, so a coherent state of
real amplitude a is a unit-width Gaussian centred at sqrt(2)*a, and the
momentum-side roots of the coherent-pair products sit at multiples of
pi / (2 sqrt(2) a).
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .mk import expand_mk
from .numerics import integrate_segments

__all__ = [
    "ParityFunctionPair",
    "RootBinningSpec",
    "LABELINGS",
    "overlaps_VW",
    "class_correlator",
    "bell_factor_root",
    "max_theta_bell",
    "optimal_phase",
    "maximal_violation_curve",
    "cat_pair",
    "cat_state_terms",
    "psi3_prime_terms",
    "binned_product_probabilities",
    "binned_product_correlator",
    "Psi3Report",
    "psi3_bell_report",
    "direct_bell_psi3",
]

LABELINGS = ("x-unprimed", "p-unprimed")


@dataclass(frozen=True)
class ParityFunctionPair:
    """Even f / odd g with their Fourier-side partners and sign-root lists.

    ``x_roots`` are the points where f*g changes sign, ``p_roots`` where
    f~*h~ does; both sorted strictly increasing.  The windows bound the
    quadrature range; tails beyond them must be negligible.
    """

    f: Callable
    g: Callable
    f_tilde: Callable
    h_tilde: Callable
    x_roots: tuple
    p_roots: tuple
    x_window: float
    p_window: float

    def __post_init__(self):
        for name in ("x_roots", "p_roots"):
            roots = tuple(float(r) for r in getattr(self, name))
            if any(b <= a for a, b in zip(roots, roots[1:])):
                raise ValueError(f"{name} must be strictly increasing")
            object.__setattr__(self, name, roots)

    def x_segments(self):
        return _signed_segments(
            lambda x: self.f(x) * self.g(x), self.x_roots, self.x_window
        )

    def p_segments(self):
        return _signed_segments(
            lambda p: self.f_tilde(p) * self.h_tilde(p), self.p_roots, self.p_window
        )


@dataclass(frozen=True)
class RootBinningSpec:
    """Abstract root-binning inputs: the two overlaps, the state phase, and
    the party count.  V and W live in [0, 1] by Cauchy-Schwarz."""

    V: float
    W: float
    theta: float
    m: int

    def __post_init__(self):
        if not (-1e-9 <= self.V <= 1.0 + 1e-9 and -1e-9 <= self.W <= 1.0 + 1e-9):
            raise ValueError("V and W must lie in [0, 1]")
        if self.m < 1:
            raise ValueError("party count must be >= 1")
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")


def _signed_segments(product_fn, roots, window):
    """Partition (-window, window) at the roots and attach the sign of the
    product on each piece, evaluated at the midpoint."""
    edges = [-window]
    edges.extend(r for r in roots if -window < r < window)
    edges.append(window)
    segments = []
    for a, b in zip(edges, edges[1:]):
        mid = 0.5 * (a + b)
        sign = 1 if float(product_fn(np.asarray(mid))) >= 0.0 else -1
        segments.append((a, b, sign))
    return tuple(segments)


def overlaps_VW(pair: ParityFunctionPair, tol: float = 1e-9):
    """V = int |f g| dx and W = int |f~ h~| dp, piecewise over the root
    partitions so every quadrature panel sees a smooth integrand."""

    def absolute_overlap(product_fn, segments):
        per_segment = max(tol / max(len(segments), 1), 1e-14)
        total = 0.0
        for a, b, _sign in segments:
            total += abs(integrate_segments(product_fn, [(a, b)], tol=per_segment))
        return total

    v = absolute_overlap(lambda x: pair.f(x) * pair.g(x), pair.x_segments())
    w = absolute_overlap(
        lambda p: pair.f_tilde(p) * pair.h_tilde(p), pair.p_segments()
    )
    return v, w


def class_correlator(spec: RootBinningSpec, k: int) -> float:
    """Correlator when k parties measure X and m-k measure P."""
    if not 0 <= k <= spec.m:
        raise ValueError("k must lie between 0 and m")
    return (
        spec.V ** k
        * spec.W ** (spec.m - k)
        * math.cos(spec.theta + (spec.m - k) * math.pi / 2.0)
    )


def _x_count(setting_tuple, m: int, labeling: str) -> int:
    unprimed = m - sum(setting_tuple)
    if labeling == "x-unprimed":
        return unprimed
    if labeling == "p-unprimed":
        return m - unprimed
    raise ValueError(f"unknown labeling: {labeling!r}")


def bell_factor_root(spec: RootBinningSpec, labeling: str = "x-unprimed") -> float:
    """|<B_m>| from the class correlators.

    ``labeling`` decides whether the unprimed setting measures X or P;
    "best" evaluates both and returns the larger.
    """
    if labeling == "best":
        return max(bell_factor_root(spec, lab) for lab in LABELINGS)
    expansion = expand_mk(spec.m)
    total = sum(
        float(c) * class_correlator(spec, _x_count(t, spec.m, labeling))
        for t, c in expansion.terms.items()
    )
    return abs(total)


def max_theta_bell(v: float, w: float, m: int, labeling: str = "x-unprimed") -> float:
    """Bell factor maximized analytically over the state phase.

    As a function of theta the factor is A cos(theta) + B sin(theta), so the
    maximum is hypot(A, B); no numerical search involved.
    """
    if labeling == "best":
        return max(max_theta_bell(v, w, m, lab) for lab in LABELINGS)
    expansion = expand_mk(m)
    a = b = 0.0
    for t, c in expansion.terms.items():
        k = _x_count(t, m, labeling)
        amp = float(c) * v ** k * w ** (m - k)
        psi = (m - k) * math.pi / 2.0
        a += amp * math.cos(psi)
        b -= amp * math.sin(psi)
    return math.hypot(a, b)


def optimal_phase(m: int) -> float:
    """State phase maximizing the Bell factor at V = W = 1: (1-m) pi/4."""
    if m < 1:
        raise ValueError("party count must be >= 1")
    return (1 - m) * math.pi / 4.0


def maximal_violation_curve(m_max: int):
    """(m, Bell factor) at V = W = 1 and the optimal phase, for m = 2..m_max.
    Each value equals the quantum bound 2^((m+1)/2)."""
    if m_max < 2:
        raise ValueError("need m_max >= 2")
    return [
        (m, bell_factor_root(RootBinningSpec(1.0, 1.0, optimal_phase(m), m)))
        for m in range(2, m_max + 1)
    ]


def cat_pair(alpha: float) -> ParityFunctionPair:
    """Even and odd superpositions of |alpha> and |-alpha> as a parity pair:

        f(x) = c_+ [ <x|alpha> + <x|-alpha> ],   c_+^2 = 1/[2(1 + e^{-2 a^2})]
        g(x) = c_- [ <x|alpha> - <x|-alpha> ],   c_-^2 = 1/[2(1 - e^{-2 a^2})]

    f*g has its only sign change at x = 0; f~*h~ ~ -e^{-p^2} sin(2 sqrt(2)
    alpha p) changes sign at every multiple of pi/(2 sqrt(2) alpha).
    """
    if alpha <= 0:
        raise ValueError("amplitude must be > 0")
    a2 = alpha * alpha
    c_plus = 1.0 / math.sqrt(2.0 * (1.0 + math.exp(-2.0 * a2)))
    c_minus = 1.0 / math.sqrt(2.0 * (1.0 - math.exp(-2.0 * a2)))
    mu = math.sqrt(2.0) * alpha
    quartic = math.pi ** -0.25

    def f(x):
        return c_plus * quartic * (
            np.exp(-0.5 * (x - mu) ** 2) + np.exp(-0.5 * (x + mu) ** 2)
        )

    def g(x):
        return c_minus * quartic * (
            np.exp(-0.5 * (x - mu) ** 2) - np.exp(-0.5 * (x + mu) ** 2)
        )

    def f_tilde(p):
        return 2.0 * c_plus * quartic * np.exp(-0.5 * p ** 2) * np.cos(mu * p)

    def h_tilde(p):
        return -2.0 * c_minus * quartic * np.exp(-0.5 * p ** 2) * np.sin(mu * p)

    window = 8.0 + 2.0 * mu
    spacing = math.pi / (2.0 * mu)
    k_max = int(window / spacing)
    p_roots = tuple(k * spacing for k in range(-k_max, k_max + 1))
    return ParityFunctionPair(
        f=f,
        g=g,
        f_tilde=f_tilde,
        h_tilde=h_tilde,
        x_roots=(0.0,),
        p_roots=p_roots,
        x_window=window,
        p_window=window,
    )


def cat_state_terms(alpha: float, m: int, theta: float = 0.0):
    """(|f>^m + e^{i theta} |g>^m)/sqrt(2) for the cat pair, expanded into
    coherent product terms: one weight per sign pattern of the amplitudes."""
    if alpha <= 0:
        raise ValueError("amplitude must be > 0")
    a2 = alpha * alpha
    c_plus = 1.0 / math.sqrt(2.0 * (1.0 + math.exp(-2.0 * a2)))
    c_minus = 1.0 / math.sqrt(2.0 * (1.0 - math.exp(-2.0 * a2)))
    w_even = c_plus ** m / math.sqrt(2.0)
    w_odd = cmath.exp(1j * theta) * c_minus ** m / math.sqrt(2.0)
    terms = []
    for signs in itertools.product((1, -1), repeat=m):
        parity = 1
        for s in signs:
            parity *= s
        weight = w_even + w_odd * parity
        terms.append((weight, tuple(s * alpha for s in signs)))
    return tuple(terms)


def psi3_prime_terms(alpha: float):
    """The large-amplitude three-mode candidate state: an equal-weight sum of
    |a,a,a>, |a,-a,-a>, |-a,a,-a>, |-a,-a,a> with c'^2 = 1/[4(1+3e^{-4a^2})]."""
    if alpha <= 0:
        raise ValueError("amplitude must be > 0")
    weight = 1.0 / (2.0 * math.sqrt(1.0 + 3.0 * math.exp(-4.0 * alpha * alpha)))
    patterns = ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1))
    return tuple(
        (weight, tuple(s * alpha for s in signs)) for signs in patterns
    )


def _coherent_cross_x(a: float, b: float):
    """<x|a> <x|b> for real amplitudes: both wavefunctions are real Gaussians."""
    mu_a = math.sqrt(2.0) * a
    mu_b = math.sqrt(2.0) * b

    def cross(x):
        return (math.pi ** -0.5) * np.exp(
            -0.5 * (x - mu_a) ** 2 - 0.5 * (x - mu_b) ** 2
        )

    return cross


def _coherent_cross_p(a: float, b: float):
    """<p|a> conj(<p|b>) = pi^{-1/2} e^{-p^2} e^{-i sqrt(2) (a-b) p}."""
    delta = math.sqrt(2.0) * (a - b)

    def cross(p):
        return (math.pi ** -0.5) * np.exp(-p * p) * np.exp(-1j * delta * p)

    return cross


def _mode_table(pair, setting, amplitudes, tol):
    """Per-mode integrals of every coherent cross term over the two binning
    domains.  Returns {(a, b): (I_plus, I_minus)}."""
    if setting == "x":
        segments = pair.x_segments()
        make_cross = _coherent_cross_x
    elif setting == "p":
        segments = pair.p_segments()
        make_cross = _coherent_cross_p
    else:
        raise ValueError(f"setting must be 'x' or 'p', got {setting!r}")
    plus = [(a, b) for a, b, s in segments if s > 0]
    minus = [(a, b) for a, b, s in segments if s < 0]
    per_call = max(tol / 2.0, 1e-14)
    table = {}
    for a, b in itertools.product(sorted(set(amplitudes)), repeat=2):
        cross = make_cross(a, b)
        i_plus = integrate_segments(cross, plus, tol=per_call) if plus else 0.0
        i_minus = integrate_segments(cross, minus, tol=per_call) if minus else 0.0
        table[(a, b)] = (i_plus, i_minus)
    return table


def binned_product_probabilities(terms, settings, pair, tol=1e-9):
    """Joint probabilities of all 2^m binned outcomes for a superposition of
    products of coherent states, measured along ``settings`` ('x'/'p' per
    mode) and binned by the pair's root partitions.

    Every domain integral factorizes into per-mode one-dimensional integrals
    of Gaussian cross terms over the root intervals.
    """
    m = len(settings)
    if any(len(amps) != m for _w, amps in terms):
        raise ValueError("term amplitude vectors must match the settings length")
    tables = []
    for t, setting in enumerate(settings):
        amplitudes = [amps[t] for _w, amps in terms]
        tables.append(_mode_table(pair, setting, amplitudes, tol))
    probabilities = {}
    for outcome in itertools.product((1, -1), repeat=m):
        total = 0.0 + 0.0j
        for w_i, amps_i in terms:
            for w_j, amps_j in terms:
                factor = w_i * complex(w_j).conjugate()
                for t in range(m):
                    pair_integrals = tables[t][(amps_i[t], amps_j[t])]
                    factor *= pair_integrals[0] if outcome[t] == 1 else pair_integrals[1]
                total += factor
        if abs(total.imag) > 1e-10:
            raise ArithmeticError(
                f"probability came out non-real ({total!r}); inconsistent terms"
            )
        probabilities[outcome] = total.real
    return probabilities


def binned_product_correlator(terms, settings, pair, tol=1e-9):
    """Full correlator sum_d sign(d) P_d for the binned product state."""
    probabilities = binned_product_probabilities(terms, settings, pair, tol)
    total = 0.0
    for outcome, p in probabilities.items():
        sign = 1
        for d in outcome:
            sign *= d
        total += sign * p
    return total


@dataclass(frozen=True)
class Psi3Report:
    """Direct-integration results for the three-mode candidate state."""

    alpha: float
    bell_x_unprimed: float
    bell_p_unprimed: float
    correlators: dict  # X-measurement count -> correlator
    probability_sums: dict  # X-measurement count -> sum of the 8 outcome probs
    min_probability: float

    @property
    def bell_best(self) -> float:
        return max(self.bell_x_unprimed, self.bell_p_unprimed)


def psi3_bell_report(alpha: float, tol: float = 1e-9) -> Psi3Report:
    """Bell factor of the three-mode coherent-superposition state by direct
    domain integration of its binned joint probabilities.

    The state is permutation symmetric, so each correlator depends only on
    how many parties measured X; the four values cover both labelings.
    """
    pair = cat_pair(alpha)
    terms = psi3_prime_terms(alpha)
    correlators = {}
    probability_sums = {}
    min_probability = math.inf
    for n_x in range(4):
        settings = "x" * n_x + "p" * (3 - n_x)
        probs = binned_product_probabilities(terms, settings, pair, tol)
        probability_sums[n_x] = sum(probs.values())
        min_probability = min(min_probability, min(probs.values()))
        correlators[n_x] = sum(
            (outcome[0] * outcome[1] * outcome[2]) * p for outcome, p in probs.items()
        )
    expansion = expand_mk(3)
    bells = {}
    for labeling in LABELINGS:
        total = sum(
            float(c) * correlators[_x_count(t, 3, labeling)]
            for t, c in expansion.terms.items()
        )
        bells[labeling] = abs(total)
    return Psi3Report(
        alpha=alpha,
        bell_x_unprimed=bells["x-unprimed"],
        bell_p_unprimed=bells["p-unprimed"],
        correlators=correlators,
        probability_sums=probability_sums,
        min_probability=min_probability,
    )


def direct_bell_psi3(alpha: float, tol: float = 1e-9) -> float:
    """Bell factor of the three-mode candidate state, maximized over the two
    X/P labelings of the measurement settings."""
    return psi3_bell_report(alpha, tol).bell_best
