"""Deterministic graph families for testing and worst-case analysis.

Random families are pure functions of their seed, so an ensemble spec
reproduces the identical graph sequence anywhere.  The chain-plus-star
families (``upper_bound_graph`` / ``worst_case_graph``) realize the
equalized worst case used by the bound solver, and ``tightness_family``
drives the geometric mechanism's ratio arbitrarily close to 1/2.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import permutations
from typing import Iterator

from .graph import Dag, _dag_unchecked

_MASK64 = (1 << 64) - 1


def _child_seed(seed: int, index: int) -> int:
    """Split one 64-bit seed into per-index streams (splitmix-style)."""
    return (seed * 0x9E3779B97F4A7C15 + index * 0xBF58476D1CE4E5B9 + 0x94D049BB133111EB) & _MASK64


def gnp_dag(n: int, p: float, seed: int) -> Dag:
    """Random DAG with identity topological order.

    Each edge (i, j) with i > j is included independently with
    probability p, so edges always point from higher to lower IDs.
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if not 0 <= p <= 1:
        raise ValueError(f"edge probability must be in [0, 1], got {p!r}")
    rng = random.Random(seed)
    edges = {
        (i, j)
        for i in range(2, n + 1)
        for j in range(1, i)
        if rng.random() < p
    }
    return _dag_unchecked(n, frozenset(edges))


def random_forest(n: int, seed: int) -> Dag:
    """Random forest: node i picks a parent uniformly from {none, 1..i-1}.

    Each node is a fresh root with probability 1/i, otherwise it follows a
    uniformly random lower-indexed node, so out-degrees are at most 1.
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    rng = random.Random(seed)
    edges = set()
    for i in range(2, n + 1):
        parent = rng.randrange(i)
        if parent:
            edges.add((i, parent))
    return _dag_unchecked(n, frozenset(edges))


def chain(n: int) -> Dag:
    """The path n -> n-1 -> ... -> 1; agent 1 collects everyone's progeny."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    return _dag_unchecked(n, frozenset((i + 1, i) for i in range(1, n)))


def upper_bound_graph(k: int) -> Dag:
    """Chain-plus-star on 2k-1 agents: leaves 1..k-1 all follow agent k,
    and agents k..2k-2 chain upward to 2k-1.

    Agent i's progeny is i for every i >= k, and the influential set is
    exactly the chain 2k-1, 2k-2, ..., k.
    """
    if not isinstance(k, int) or k < 2:
        raise ValueError(f"k must be an integer >= 2, got {k!r}")
    edges = {(i, k) for i in range(1, k)} | {(j, j + 1) for j in range(k, 2 * k - 1)}
    return _dag_unchecked(2 * k - 1, frozenset(edges))


def worst_case_graph(k: int, j: int) -> Dag:
    """``upper_bound_graph(k)`` with the out-edges of agents j..2k-2 deleted.

    Truncates the influential chain at j: the set becomes j, j-1, ..., k.
    j = 2k-1 deletes nothing and returns the base graph.
    """
    base = upper_bound_graph(k)
    if not isinstance(j, int) or not k <= j <= 2 * k - 1:
        raise ValueError(f"j must satisfy k <= j <= 2k-1, got k={k}, j={j!r}")
    kept = frozenset(e for e in base.edges if e[0] < j)
    return _dag_unchecked(base.n, kept)


def tightness_family(k: int) -> Dag:
    """Two-member influential set whose geometric ratio tends to 1/2.

    Agent 1 is the sink, followed by agent 2 and k-1 leaves; agent 2 is
    followed by k leaves.  Progenies are 2k+1 and k+1, so the geometric
    ratio is (k+1)/(2(2k+1)) + 1/4, decreasing toward 1/2 as k grows.
    """
    if not isinstance(k, int) or k < 1:
        raise ValueError(f"k must be a positive integer, got {k!r}")
    edges = {(2, 1)}
    edges |= {(t, 2) for t in range(3, k + 3)}
    edges |= {(t, 1) for t in range(k + 3, 2 * k + 2)}
    return _dag_unchecked(2 * k + 1, frozenset(edges))


def witness_graph() -> Dag:
    """Seven-agent fixture with influential set [(1, 7), (2, 4)].

    Hiding edge (2, 1) makes agent 2 the top agent, which is the standard
    counterexample against the pick-the-maximum baseline.
    """
    return Dag(7, frozenset({(2, 1), (5, 1), (3, 2), (4, 2), (7, 3), (6, 5)}))


def demo_graph() -> Dag:
    """Eight-agent demo with a two-member influential set (progenies 8, 6).

    Geometric selects agent 1 with 1/4, agent 2 with 1/2, abstains with
    1/4; the expected progeny is 5 and the ratio 5/8.
    """
    edges = {(2, 1), (8, 1)} | {(t, 2) for t in range(3, 8)}
    return Dag(8, frozenset(edges))


def all_labeled_dags(n: int) -> Iterator[Dag]:
    """Every labeled DAG on agents 1..n, exactly once.

    Enumerates all edge subsets compatible with each topological order and
    deduplicates; intended for exhaustive checks at n <= 5 (29281 graphs).
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    seen: set[frozenset[tuple[int, int]]] = set()
    pair_positions = [(a, b) for a in range(n) for b in range(a + 1, n)]
    for perm in permutations(range(1, n + 1)):
        slots = [(perm[a], perm[b]) for a, b in pair_positions]
        for mask in range(1 << len(slots)):
            edges = frozenset(slots[b] for b in range(len(slots)) if (mask >> b) & 1)
            if edges not in seen:
                seen.add(edges)
                yield _dag_unchecked(n, edges)


FAMILIES = ("gnp-dag", "random-forest", "chain", "upper-bound", "worst-case", "tightness")


@dataclass(frozen=True)
class EnsembleSpec:
    """A reproducible graph stream: family, family parameters, and seed."""

    family: str
    seed: int = 0
    n: int | None = None
    p: float | None = None
    k: int | None = None
    j: int | None = None

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {FAMILIES}")


def generate_one(spec: EnsembleSpec, index: int = 0) -> Dag:
    """The index-th graph of the stream; random families split the seed per index."""
    seed = _child_seed(spec.seed, index)
    if spec.family == "gnp-dag":
        if spec.n is None or spec.p is None:
            raise ValueError("gnp-dag needs n and p")
        return gnp_dag(spec.n, spec.p, seed)
    if spec.family == "random-forest":
        if spec.n is None:
            raise ValueError("random-forest needs n")
        return random_forest(spec.n, seed)
    if spec.family == "chain":
        if spec.n is None:
            raise ValueError("chain needs n")
        return chain(spec.n)
    if spec.family == "upper-bound":
        if spec.k is None:
            raise ValueError("upper-bound needs k")
        return upper_bound_graph(spec.k)
    if spec.family == "worst-case":
        if spec.k is None or spec.j is None:
            raise ValueError("worst-case needs k and j")
        return worst_case_graph(spec.k, spec.j)
    if spec.family == "tightness":
        if spec.k is None:
            raise ValueError("tightness needs k")
        return tightness_family(spec.k)
    raise ValueError(f"unknown family {spec.family!r}")


def ensemble(spec: EnsembleSpec, count: int) -> Iterator[Dag]:
    """Stream ``count`` graphs from the spec, reproducibly."""
    for index in range(count):
        yield generate_one(spec, index)
