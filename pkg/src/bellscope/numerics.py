"""Shared numerical kernels: reciprocal gamma, Hermite polynomials, adaptive
Gauss-Kronrod quadrature, and symmetric eigenproblems.

Everything in this module is a pure function of its inputs; nothing keeps
mutable state, so all of it is safe to call from parallel workers.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "IntegrationError",
    "LogSignedReal",
    "rgamma_log",
    "reciprocal_gamma",
    "hermite_eval",
    "integrate_1d",
    "integrate_segments",
    "max_eigenpair",
]


class IntegrationError(RuntimeError):
    """Adaptive quadrature could not reach the requested tolerance."""

    def __init__(self, message, achieved_error=None):
        super().__init__(message)
        self.achieved_error = achieved_error


@dataclass(frozen=True)
class LogSignedReal:
    """A real number stored as a sign and the natural log of its magnitude.

    Products whose factors span hundreds of orders of magnitude stay
    representable this way; the value is exponentiated once, at the end.
    ``sign == 0`` means exactly zero, whatever ``log_magnitude`` holds.
    """

    log_magnitude: float
    sign: int

    @classmethod
    def from_float(cls, x: float) -> "LogSignedReal":
        if x == 0.0:
            return cls(0.0, 0)
        return cls(math.log(abs(x)), 1 if x > 0 else -1)

    def __mul__(self, other: "LogSignedReal") -> "LogSignedReal":
        if self.sign == 0 or other.sign == 0:
            return LogSignedReal(0.0, 0)
        return LogSignedReal(
            self.log_magnitude + other.log_magnitude, self.sign * other.sign
        )

    def __neg__(self) -> "LogSignedReal":
        return LogSignedReal(self.log_magnitude, -self.sign)

    def scaled(self, factor: float) -> "LogSignedReal":
        return self * LogSignedReal.from_float(factor)

    def power(self, exponent: float) -> "LogSignedReal":
        """Raise to a real power.  Negative bases need an integer exponent."""
        if self.sign == 0:
            if exponent <= 0:
                raise ValueError("zero cannot be raised to a non-positive power")
            return LogSignedReal(0.0, 0)
        if self.sign < 0:
            if exponent != int(exponent):
                raise ValueError("negative base needs an integer exponent")
            sign = -1 if int(exponent) % 2 else 1
            return LogSignedReal(self.log_magnitude * exponent, sign)
        return LogSignedReal(self.log_magnitude * exponent, 1)

    def value(self) -> float:
        """Back to an ordinary float; underflows to 0.0, overflows to +/-inf."""
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.exp(self.log_magnitude)
        except OverflowError:
            return self.sign * math.inf


def _sinpi(z: float) -> float:
    """sin(pi*z) with the argument reduced before multiplying by pi."""
    n = round(z)
    r = z - n
    s = math.sin(math.pi * r)
    return -s if n % 2 else s


def rgamma_log(z: float) -> LogSignedReal:
    """1/Gamma(z) as a signed log value; exactly zero at the poles of Gamma.

    For z <= 0 the reflection formula 1/Gamma(z) = Gamma(1-z) sin(pi z)/pi
    keeps lgamma's argument positive.
    """
    if not math.isfinite(z):
        raise ValueError("argument must be finite")
    if z > 0:
        return LogSignedReal(-math.lgamma(z), 1)
    if z == math.floor(z):
        return LogSignedReal(0.0, 0)
    s = _sinpi(z)
    sign = 1 if s > 0 else -1
    log_mag = math.log(abs(s)) - math.log(math.pi) + math.lgamma(1.0 - z)
    return LogSignedReal(log_mag, sign)


def reciprocal_gamma(z: float) -> float:
    """1/Gamma(z), total on the reals: returns 0.0 at non-positive integers."""
    return rgamma_log(z).value()


def hermite_eval(n: int, x):
    """Physicists' Hermite polynomial H_n(x) by the three-term recurrence
    H_{k+1} = 2x H_k - 2k H_{k-1}.  Works elementwise on numpy arrays.
    """
    if n < 0:
        raise ValueError("degree must be >= 0")
    xa = np.asarray(x, dtype=float)
    h_prev = np.ones_like(xa)
    if n == 0:
        return h_prev if xa.ndim else 1.0
    h = 2.0 * xa
    for k in range(1, n):
        h, h_prev = 2.0 * xa * h - 2.0 * k * h_prev, h
    return h if xa.ndim else float(h)


# 7-point Gauss / 15-point Kronrod pair.  Gauss weights are zero at the
# Kronrod-only nodes so both rules come from one set of evaluations.
_GK_NODES = np.array(
    [
        -0.991455371120813,
        -0.949107912342759,
        -0.864864423359769,
        -0.741531185599394,
        -0.586087235467691,
        -0.405845151377397,
        -0.207784955007898,
        0.0,
        0.207784955007898,
        0.405845151377397,
        0.586087235467691,
        0.741531185599394,
        0.864864423359769,
        0.949107912342759,
        0.991455371120813,
    ]
)
_GK_WK = np.array(
    [
        0.022935322010529,
        0.063092092629979,
        0.104790010322250,
        0.140653259715525,
        0.169004726639267,
        0.190350578064785,
        0.204432940075298,
        0.209482141084728,
        0.204432940075298,
        0.190350578064785,
        0.169004726639267,
        0.140653259715525,
        0.104790010322250,
        0.063092092629979,
        0.022935322010529,
    ]
)
_GK_WG = np.array(
    [
        0.0,
        0.129484966168870,
        0.0,
        0.279705391489277,
        0.0,
        0.381830050505119,
        0.0,
        0.417959183673469,
        0.0,
        0.381830050505119,
        0.0,
        0.279705391489277,
        0.0,
        0.129484966168870,
        0.0,
    ]
)


def _panel(f, a, b):
    """One Gauss-Kronrod panel: returns (kronrod value, |K - G| error guess)."""
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    ys = np.asarray(f(mid + half * _GK_NODES))
    if not np.all(np.isfinite(ys)):
        raise IntegrationError("integrand returned a non-finite value")
    k = half * (_GK_WK @ ys)
    g = half * (_GK_WG @ ys)
    return k, abs(k - g)


def integrate_segments(f, segments, tol=1e-10, max_intervals=4096):
    """Adaptive quadrature over a union of finite segments.

    ``f`` must accept a numpy array of abscissas (complex results are fine).
    The worst segment is bisected until the summed error estimate drops below
    ``tol`` in absolute terms, or below the machine-precision floor of the
    running sum, whichever is larger.  Running out of subdivisions raises
    ``IntegrationError`` carrying the achieved error estimate.
    """
    entries = []  # heap of (-err, tiebreak, a, b, value, err)
    counter = 0
    total = 0.0
    total_err = 0.0
    total_abs = 0.0
    for a, b in segments:
        if b == a:
            continue
        val, err = _panel(f, a, b)
        heapq.heappush(entries, (-err, counter, a, b, val, err))
        counter += 1
        total = total + val
        total_err += err
        total_abs += abs(val)

    while total_err > max(tol, 64.0 * np.finfo(float).eps * total_abs):
        if len(entries) >= max_intervals:
            raise IntegrationError(
                f"no convergence after {max_intervals} intervals "
                f"(error estimate {total_err:.3e}, tol {tol:.3e})",
                achieved_error=total_err,
            )
        neg_err, _, a, b, val, err = heapq.heappop(entries)
        if err == 0.0:
            heapq.heappush(entries, (neg_err, counter, a, b, val, err))
            break
        total = total - val
        total_err -= err
        total_abs -= abs(val)
        mid = 0.5 * (a + b)
        for lo, hi in ((a, mid), (mid, b)):
            val2, err2 = _panel(f, lo, hi)
            heapq.heappush(entries, (-err2, counter, lo, hi, val2, err2))
            counter += 1
            total = total + val2
            total_err += err2
            total_abs += abs(val2)

    if isinstance(total, complex) or np.iscomplexobj(total):
        return complex(total)
    return float(total)


def integrate_1d(f, a, b, tol=1e-10, max_intervals=4096, initial_splits=8):
    """Adaptive Gauss-Kronrod quadrature of f over (a, b) to absolute
    tolerance ``tol``.

    Infinite endpoints are mapped to a finite parameter first:
    both infinite   x = t/(1-t^2)   on t in (-1, 1),
    upper infinite  x = a + t/(1-t) on t in (0, 1),
    lower infinite  x = b - t/(1-t) on t in (0, 1).
    The integrand must accept numpy arrays.
    """
    if a == b:
        return 0.0
    if a > b:
        return -integrate_1d(f, b, a, tol=tol, max_intervals=max_intervals)

    neg_inf = math.isinf(a) and a < 0
    pos_inf = math.isinf(b) and b > 0
    if neg_inf and pos_inf:
        def g(t):
            denom = 1.0 - t * t
            return f(t / denom) * (1.0 + t * t) / (denom * denom)

        lo, hi = -1.0, 1.0
    elif pos_inf:
        def g(t):
            denom = 1.0 - t
            return f(a + t / denom) / (denom * denom)

        lo, hi = 0.0, 1.0
    elif neg_inf:
        def g(t):
            denom = 1.0 - t
            return f(b - t / denom) / (denom * denom)

        lo, hi = 0.0, 1.0
    else:
        g, lo, hi = f, a, b

    edges = np.linspace(lo, hi, initial_splits + 1)
    segments = list(zip(edges[:-1], edges[1:]))
    return integrate_segments(g, segments, tol=tol, max_intervals=max_intervals)


def _check_symmetric(matrix) -> np.ndarray:
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    if m.shape[0] == 0:
        raise ValueError("dimension 0 rejected")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    scale = 1.0 + np.abs(m).max()
    if np.abs(m - m.T).max() > 1e-12 * scale:
        raise ValueError("matrix is not symmetric")
    return m


def _canonical_sign(v: np.ndarray) -> np.ndarray:
    """Flip the vector so its first non-negligible component is positive."""
    for x in v:
        if abs(x) > 1e-12:
            return -v if x < 0 else v
    return v


def _stationarity_residual(m, v, lam):
    grad = m @ v - lam * v
    active = v <= 1e-10
    res = np.where(active, np.maximum(grad, 0.0), grad)
    return float(np.linalg.norm(res))


def _projected_ascent(m, v0, max_steps=500):
    v = v0 / np.linalg.norm(v0)
    lam = float(v @ m @ v)
    eta = 1.0
    for _ in range(max_steps):
        grad = m @ v - lam * v
        if _stationarity_residual(m, v, lam) < 1e-12:
            break
        improved = False
        while eta > 1e-16:
            w = np.maximum(v + eta * grad, 0.0)
            norm_w = np.linalg.norm(w)
            if norm_w > 0.0:
                w = w / norm_w
                lam_w = float(w @ m @ w)
                if lam_w > lam + 1e-15:
                    v, lam = w, lam_w
                    eta *= 1.3
                    improved = True
                    break
            eta *= 0.5
        if not improved:
            break
    return v, lam


def _support_polish(m, v, lam):
    """On the converged support, the maximizer is an eigenvector of the
    restricted matrix; take it when it stays in the non-negative orthant."""
    support = np.flatnonzero(v > 1e-10)
    if support.size == 0:
        return v, lam
    sub = m[np.ix_(support, support)]
    w, vecs = np.linalg.eigh(sub)
    top = _canonical_sign(vecs[:, -1])
    if top.min() < -1e-12:
        return v, lam
    candidate = np.zeros_like(v)
    candidate[support] = np.maximum(top, 0.0)
    candidate /= np.linalg.norm(candidate)
    lam_c = float(candidate @ m @ candidate)
    if lam_c >= lam - 1e-12:
        return candidate, lam_c
    return v, lam


def _max_quadform_nonneg(m, seed, restarts=32):
    n = m.shape[0]
    rng = np.random.default_rng(seed)
    starts = [np.full(n, 1.0 / math.sqrt(n))]
    _, vecs = np.linalg.eigh(m)
    for cand in (vecs[:, -1], -vecs[:, -1]):
        clipped = np.maximum(cand, 0.0)
        norm = np.linalg.norm(clipped)
        if norm > 1e-12:
            starts.append(clipped / norm)
    for _ in range(restarts):
        x = np.abs(rng.standard_normal(n))
        starts.append(x / np.linalg.norm(x))

    best_v, best_lam, best_res = None, -math.inf, math.inf
    for v0 in starts:
        v, lam = _projected_ascent(m, v0)
        v, lam = _support_polish(m, v, lam)
        res = _stationarity_residual(m, v, lam)
        if lam > best_lam + 1e-14 or (abs(lam - best_lam) <= 1e-14 and res < best_res):
            best_v, best_lam, best_res = v, lam, res
    if best_res > 1e-8:
        raise ArithmeticError(
            f"constrained maximizer not stationary (residual {best_res:.3e})"
        )
    return best_lam, best_v


def max_eigenpair(matrix, constraint=None, seed=0):
    """Largest eigenvalue and unit eigenvector of a real symmetric matrix.

    With ``constraint="nonnegative"`` the quadratic form v.T M v is maximized
    over unit vectors with all components >= 0 instead, by projected gradient
    ascent from 32 deterministic random restarts; the returned value is a
    feasible (hence certified) lower bound with stationarity residual <= 1e-8.
    """
    m = _check_symmetric(matrix)
    if constraint is None:
        w, vecs = np.linalg.eigh(m)
        lam = float(w[-1])
        v = _canonical_sign(np.array(vecs[:, -1]))
        residual = float(np.linalg.norm(m @ v - lam * v))
        if residual > 1e-10 * max(1.0, float(np.abs(w).max())):
            raise ArithmeticError(f"eigenpair residual too large: {residual:.3e}")
        return lam, v
    if constraint in ("nonnegative", "nonneg"):
        return _max_quadform_nonneg(m, seed)
    raise ValueError(f"unknown constraint: {constraint!r}")
