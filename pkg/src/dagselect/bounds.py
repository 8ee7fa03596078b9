"""Worst-case ceiling numerics for manipulation-proof, fair selection.

On the chain-plus-star family, equalizing the expected-progeny ratio of a
probability assignment across every truncation yields a triangular linear
system whose value r_k = 1/(1 + H(2k-1) - H(k)) decreases to 1/(1 + ln 2)
as k grows.  This module solves the system exactly and in floating point,
tabulates the convergence, and measures concrete mechanisms against the
finite-k ceiling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .generators import worst_case_graph
from .mechanisms import Mechanism, expected_ratio

# Direct harmonic summation up to 1e7 terms, series expansion beyond.
_DIRECT_SUM_LIMIT = 10**7
_EXACT_DEFAULT_MAX_K = 128


def limit_constant() -> float:
    """The limiting equalized ratio 1/(1 + ln 2)."""
    return 1.0 / (1.0 + math.log(2.0))


def _harmonic_tail_series(k: int) -> float:
    """H(2k-1) - H(k) via the log expansion (Euler-Maclaurin terms)."""
    a, b = 2 * k - 1, k

    def correction(n: int) -> float:
        return 1.0 / (2 * n) - 1.0 / (12 * n**2) + 1.0 / (120 * n**4)

    return math.log(a / b) + correction(a) - correction(b)


def harmonic_tail(k: int, exact: bool = False) -> Fraction | float:
    """H(2k-1) - H(k) = sum of 1/j for j in k+1 .. 2k-1."""
    if not isinstance(k, int) or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    if exact:
        return sum((Fraction(1, j) for j in range(k + 1, 2 * k)), Fraction(0))
    if 2 * k - 1 <= _DIRECT_SUM_LIMIT:
        return math.fsum(1.0 / j for j in range(k + 1, 2 * k))
    return _harmonic_tail_series(k)


def equalized_ratio(k: int, exact: bool = False) -> Fraction | float:
    """Closed form r_k = 1 / (1 + H(2k-1) - H(k))."""
    if not isinstance(k, int) or k < 2:
        raise ValueError(f"k must be an integer >= 2, got {k!r}")
    tail = harmonic_tail(k, exact)
    if exact:
        return 1 / (1 + tail)
    return 1.0 / (1.0 + tail)


@dataclass(frozen=True)
class BoundSolution:
    """Equalizing weights (beta_0 .. beta_{k-1}) and the equalized ratio.

    Weight beta_t belongs to chain agent k+t of the chain-plus-star
    family; assigning them as selection probabilities makes every family
    truncation score exactly ``ratio``.
    """

    k: int
    betas: tuple[Fraction, ...] | tuple[float, ...]
    ratio: Fraction | float


def solve_equalized_system(k: int, exact: bool | None = None) -> BoundSolution:
    """Solve the equalized triangular system by forward substitution.

    Equation j (for j in k..2k-1) reads sum_{i=k}^{j} beta_{i-k} * i/j = r
    and the weights sum to 1.  Substitution gives beta_0 = r and
    beta_t = r/(k+t), hence the closed-form ratio.  Exact rational
    arithmetic by default for k <= 128, floating point beyond.
    """
    if not isinstance(k, int) or k < 2:
        raise ValueError(f"k must be an integer >= 2, got {k!r}")
    if exact is None:
        exact = k <= _EXACT_DEFAULT_MAX_K
    r = equalized_ratio(k, exact)
    betas = [r] + [r / (k + t) for t in range(1, k)]
    return BoundSolution(k, tuple(betas), r)


def solve_equalized_generic(k: int) -> BoundSolution:
    """Solve the same system with a generic dense triangular solve.

    Row t of the unnormalized system is sum_{u<=t} beta_u * (k+u) = r*(k+t);
    naive forward substitution with per-row dot products, then scaling so
    the weights sum to 1.  Cross-checks the closed form independently.
    """
    if not isinstance(k, int) or k < 2:
        raise ValueError(f"k must be an integer >= 2, got {k!r}")
    coef = np.arange(k, 2 * k, dtype=np.float64)
    rhs = np.arange(k, 2 * k, dtype=np.float64)
    scaled = np.empty(k, dtype=np.float64)
    for t in range(k):
        scaled[t] = (rhs[t] - coef[:t] @ scaled[:t]) / coef[t]
    r = 1.0 / scaled.sum()
    return BoundSolution(k, tuple(float(b) for b in scaled * r), r)


def convergence_table(k_values: Iterable[int]) -> list[tuple[int, float, float]]:
    """Rows (k, r_k, r_k - limit) sorted by k; gaps are positive and shrink."""
    ks = sorted(set(k_values))
    limit = limit_constant()
    rows = []
    for k in ks:
        r = float(equalized_ratio(k))
        rows.append((k, r, r - limit))
    return rows


@dataclass(frozen=True)
class CeilingReport:
    """A mechanism's worst ratio across one chain-plus-star family.

    ``probability_monotone`` records whether any agent's probability rose
    when her own out-edge was deleted within the family, which a
    manipulation-proof mechanism must never allow.
    """

    k: int
    ratios: tuple[tuple[int, Fraction], ...]
    min_j: int
    min_ratio: Fraction
    equalized: float
    probability_monotone: bool


def empirical_ceiling_check(mechanism: Mechanism, k: int) -> CeilingReport:
    """Evaluate the mechanism on every truncation G_j of the family.

    Reports the minimum expected-progeny ratio over j in k..2k-1, which for
    a manipulation-proof and fair mechanism cannot exceed the equalized
    ratio r_k by more than vanishing terms.
    """
    if not isinstance(k, int) or k < 2:
        raise ValueError(f"k must be an integer >= 2, got {k!r}")
    ratios: list[tuple[int, Fraction]] = []
    dists = {}
    for j in range(k, 2 * k):
        graph = worst_case_graph(k, j)
        dist = mechanism(graph)
        dists[j] = dist
        ratios.append((j, expected_ratio(graph, dist).ratio))
    min_j, min_ratio = min(ratios, key=lambda row: (row[1], row[0]))
    monotone = True
    for agent in range(k, 2 * k - 1):
        deleted = [dists[j].probability(agent) for j in range(k, agent + 1)]
        present = [dists[j].probability(agent) for j in range(agent + 1, 2 * k)]
        if deleted and present and max(deleted) > min(present):
            monotone = False
            break
    return CeilingReport(
        k, tuple(ratios), min_j, min_ratio, float(equalized_ratio(k)), monotone
    )


def fit_gap_constant(k_values: Sequence[int]) -> float:
    """Average of gap(k) * k over the grid; the gap decays like c/k."""
    rows = convergence_table(k_values)
    return sum(gap * k for k, _r, gap in rows) / len(rows)
