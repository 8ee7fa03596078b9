"""Influential-agent tests and the ranked influential set.

An agent is *influential* when, after deleting all of her own out-edges,
her progeny beats every other agent's under the tie-break order (larger
progeny wins, lower ID wins ties).  Influential agents are exactly the
ones who could make themselves the top agent by hiding edges, so they are
the only sensible recipients of selection probability.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .graph import (
    Dag,
    _ancestor_masks,
    _descendant_masks,
    _progeny_counts,
    _require_agent,
    remove_out_edges,
)


def precedes(p_i: int, i: int, p_j: int, j: int) -> bool:
    """Strict tie-break order: (p_i, -i) lexicographically above (p_j, -j)."""
    return p_i > p_j or (p_i == p_j and i < j)


def is_influential(dag: Dag, agent: int) -> bool:
    """Direct test: delete the agent's out-edges, recompute all progenies,
    and ask whether she is the tie-break maximum."""
    _require_agent(dag, agent)
    counts = _progeny_counts(remove_out_edges(dag, agent))
    key = (counts[agent - 1], -agent)
    return all((counts[j - 1], -j) < key for j in dag.agents if j != agent)


@dataclass(frozen=True)
class InfluentialSet:
    """Influential agents with their progenies, most influential first.

    The ordering key is the progeny in the graph itself; the members form
    a chain under reachability, so progenies strictly decrease along it.
    """

    members: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        keys = [(p, -a) for a, p in self.members]
        if any(k1 <= k2 for k1, k2 in zip(keys, keys[1:])):
            raise ValueError("influential members must strictly decrease in rank")

    @property
    def agents(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self.members)

    @property
    def progenies(self) -> tuple[int, ...]:
        return tuple(p for _, p in self.members)

    def top(self) -> int:
        return self.members[0][0]

    def __len__(self) -> int:
        return len(self.members)


@lru_cache(maxsize=512)
def influential_set(dag: Dag) -> InfluentialSet:
    """All influential agents, ranked by the tie-break order.

    Agents whose progeny is beaten by some agent outside their own
    reachability cone cannot be influential (deleting their out-edges
    leaves such rivals untouched), which prunes most of the per-agent
    deleted-graph recomputations.
    """
    counts = _progeny_counts(dag)
    if dag.n == 1:
        return InfluentialSet(((1, 1),))
    reach = _descendant_masks(dag)
    members: list[int] = []
    for i in dag.agents:
        key = (counts[i - 1], -i)
        cone = reach[i - 1]
        rivals = (
            (counts[j - 1], -j)
            for j in dag.agents
            if j != i and not (cone >> (j - 1)) & 1
        )
        if max(rivals, default=(0, 0)) > key:
            continue
        if is_influential(dag, i):
            members.append(i)
    members.sort(key=lambda a: (-counts[a - 1], a))
    return InfluentialSet(tuple((a, counts[a - 1]) for a in members))


def most_influential(dag: Dag) -> int:
    """The tie-break maximum progeny agent; always has no out-edges and
    equals the first member of the influential set."""
    counts = _progeny_counts(dag)
    return max(dag.agents, key=lambda a: (counts[a - 1], -a))


def progeny_set_of(dag: Dag, agent: int) -> frozenset[int]:
    """The agent's progeny as a set of agent IDs (bitmask-backed)."""
    _require_agent(dag, agent)
    mask = _ancestor_masks(dag)[agent - 1]
    return frozenset(b + 1 for b in range(dag.n) if (mask >> b) & 1)
