"""Mermin-Klyshko Bell operators for m parties, expanded symbolically.

Each party t has two dichotomic observables O_t and O_t'.  The Bell
operator family is defined by the recursion

    B_t = (B_{t-1}/2) (x) (O_t + O_t') + (B'_{t-1}/2) (x) (O_t - O_t'),

with B_1 = 2 O_1 and B_1' = 2 O_1', where B' swaps primed and unprimed
observables everywhere.  Local realism bounds |<B_m>| by 2; quantum
mechanics allows up to 2^((m+1)/2).

A setting tuple is an m-tuple of booleans, True meaning the primed setting.
Coefficients are kept as exact dyadic rationals so structural tests are
meaningful.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

__all__ = [
    "SettingTuple",
    "MKExpansion",
    "expand_mk",
    "classical_bound_exhaustive",
    "quantum_bound",
    "bell_factor",
]

SettingTuple = tuple  # m-tuple of bool, True = primed


def _sorted_terms(terms):
    return dict(sorted(terms.items()))


@dataclass(frozen=True)
class MKExpansion:
    """Signed rational coefficients of B_m over the 2^m setting tuples.

    ``terms`` is pruned of exact zeros and iterates in lexicographic order
    (unprimed before primed), so downstream output is reproducible.
    """

    m: int
    terms: dict = field(default_factory=dict)

    def primed_twin(self) -> "MKExpansion":
        """Expansion of B'_m: every tuple with primed/unprimed flipped."""
        flipped = {
            tuple(not choice for choice in t): c for t, c in self.terms.items()
        }
        return MKExpansion(self.m, _sorted_terms(flipped))

    def alpha(self) -> dict:
        """Coefficients collapsed by primed count.

        Valid as a summary only when the correlators depend on nothing but
        how many parties used the primed setting.
        """
        out = {}
        for t, c in self.terms.items():
            k = sum(t)
            out[k] = out.get(k, Fraction(0)) + c
        return {k: c for k, c in sorted(out.items()) if c != 0}


def expand_mk(m: int) -> MKExpansion:
    """Fully expanded Bell operator B_m as a map setting tuple -> coefficient."""
    if m < 1:
        raise ValueError("party count must be >= 1")
    terms = {(False,): Fraction(2)}
    twin = {(True,): Fraction(2)}
    half = Fraction(1, 2)
    for _ in range(1, m):
        new_terms: dict = {}
        new_twin: dict = {}
        # B_t  = (B/2)(O + O') + (B'/2)(O - O')
        # B'_t = (B'/2)(O + O') + (B/2)(O' - O)   [primes swapped]
        for t, c in terms.items():
            for primed in (False, True):
                key = t + (primed,)
                new_terms[key] = new_terms.get(key, Fraction(0)) + c * half
        for t, c in twin.items():
            for primed in (False, True):
                key = t + (primed,)
                sign = -1 if primed else 1
                new_terms[key] = new_terms.get(key, Fraction(0)) + sign * c * half
        for t, c in twin.items():
            for primed in (False, True):
                key = t + (primed,)
                new_twin[key] = new_twin.get(key, Fraction(0)) + c * half
        for t, c in terms.items():
            for primed in (False, True):
                key = t + (primed,)
                sign = 1 if primed else -1
                new_twin[key] = new_twin.get(key, Fraction(0)) + sign * c * half
        terms = {t: c for t, c in new_terms.items() if c != 0}
        twin = {t: c for t, c in new_twin.items() if c != 0}
    return MKExpansion(m, _sorted_terms(terms))


def classical_bound_exhaustive(expansion: MKExpansion, limit: int = 4) -> float:
    """Max of |<B_m>| over all deterministic +/-1 strategies, by exhaustion.

    The search space is 4^m strategies (each party assigns +/-1 to both of
    its observables), so the party count is capped; beyond ``limit`` the
    call refuses rather than subsampling.
    """
    m = expansion.m
    if m > limit:
        raise ValueError(
            f"exhaustive bound limited to m <= {limit} (got m = {m}); "
            "refusing to subsample"
        )
    items = list(expansion.terms.items())
    best = Fraction(0)
    for strategy in itertools.product(((1, 1), (1, -1), (-1, 1), (-1, -1)), repeat=m):
        value = Fraction(0)
        for t, c in items:
            product = 1
            for party, primed in enumerate(t):
                product *= strategy[party][1 if primed else 0]
            value += c * product
        best = max(best, abs(value))
    return float(best)


def quantum_bound(m: int) -> float:
    """Largest |<B_m>| quantum mechanics allows: 2^((m+1)/2)."""
    if m < 1:
        raise ValueError("party count must be >= 1")
    return 2.0 ** ((m + 1) / 2.0)


def bell_factor(expansion: MKExpansion, correlator) -> float:
    """|sum of coefficient * correlator(setting tuple)| over the expansion.

    ``correlator`` maps a setting tuple to the expectation value of the
    corresponding product observable; non-finite values are an error.
    """
    total = 0.0
    for t, c in expansion.terms.items():
        e = correlator(t)
        if not math.isfinite(e):
            raise ValueError(f"correlator returned non-finite value {e!r} at {t}")
        total += float(c) * e
    return abs(total)
