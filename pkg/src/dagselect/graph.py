"""Directed acyclic graphs of follow relationships.

Agents are numbered 1..n and a directed edge ``(u, v)`` records that agent
u follows agent v.  Agent i's *progeny* is the set of agents that can reach
i along follow edges, i itself included; its size is the influence measure
everything else in this package builds on.

Edge-list file format (``parse_edge_list`` / ``serialize``):

    line 1:        n, the agent count (>= 1)
    other lines:   "u v" meaning u follows v (1-based IDs)
    lines starting with "#" and blank lines are ignored

Graphs are immutable after construction.  All functions here are pure, so
values can be shared freely between threads.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from typing import IO, Iterable, Mapping


class DagError(ValueError):
    """Base class for graph construction, validation and parse failures."""


class MalformedLineError(DagError):
    """A line of edge-list input that does not scan."""


class AgentRangeError(DagError):
    """An agent ID outside 1..n (or a non-positive agent count)."""


class SelfLoopError(DagError):
    """An agent following herself."""


class DuplicateEdgeError(DagError):
    """The same edge declared twice in one input."""


class CycleError(DagError):
    """A directed cycle; the message names an edge that closes one."""


class UnknownAgentError(DagError):
    """An operation referenced an agent the graph does not contain."""


class ReportError(DagError):
    """A report declaring edges the true graph does not contain."""


@dataclass(frozen=True)
class Dag:
    """Immutable DAG over agents 1..n.

    ``edges`` is a frozenset of (follower, followee) pairs.  Construction
    validates ID ranges, rejects self-loops and checks acyclicity.
    """

    n: int
    edges: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self) -> None:
        edges = frozenset((int(u), int(v)) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        if not isinstance(self.n, int) or self.n < 1:
            raise AgentRangeError(f"agent count must be a positive integer, got {self.n!r}")
        for u, v in edges:
            if not (1 <= u <= self.n and 1 <= v <= self.n):
                raise AgentRangeError(f"edge ({u}, {v}) has an endpoint outside 1..{self.n}")
            if u == v:
                raise SelfLoopError(f"self-loop at agent {u}")
        _topological_order(self.n, edges)

    @property
    def agents(self) -> range:
        return range(1, self.n + 1)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def __repr__(self) -> str:  # keep ensemble logs readable
        return f"Dag(n={self.n}, edges={self.sorted_edges()})"


def _dag_unchecked(n: int, edges: frozenset[tuple[int, int]]) -> Dag:
    """Build a Dag skipping validation.

    Only for edge subsets of an already validated graph, where deletion
    cannot introduce cycles or bad IDs.
    """
    dag = object.__new__(Dag)
    object.__setattr__(dag, "n", n)
    object.__setattr__(dag, "edges", edges)
    return dag


def _topological_order(n: int, edges: Iterable[tuple[int, int]]) -> tuple[int, ...]:
    """Kahn's algorithm; raises CycleError naming a closing edge."""
    succ: dict[int, list[int]] = {i: [] for i in range(1, n + 1)}
    indeg = [0] * (n + 1)
    for u, v in sorted(edges):
        succ[u].append(v)
        indeg[v] += 1
    queue = deque(i for i in range(1, n + 1) if indeg[i] == 0)
    order: list[int] = []
    while queue:
        u = queue.popleft()
        order.append(u)
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    if len(order) != n:
        remaining = {i for i in range(1, n + 1) if indeg[i] > 0}
        raise CycleError(f"cycle detected: edge {_closing_edge(succ, remaining)} closes a cycle")
    return tuple(order)


def _closing_edge(succ: Mapping[int, list[int]], remaining: set[int]) -> tuple[int, int]:
    """Find one edge that closes a cycle among the given nodes."""
    start = min(remaining)
    on_stack: set[int] = set()
    done: set[int] = set()
    stack: list[tuple[int, int]] = [(start, 0)]
    on_stack.add(start)
    while stack:
        node, idx = stack[-1]
        nexts = [w for w in succ[node] if w in remaining]
        if idx < len(nexts):
            stack[-1] = (node, idx + 1)
            w = nexts[idx]
            if w in on_stack:
                return (node, w)
            if w not in done:
                stack.append((w, 0))
                on_stack.add(w)
        else:
            stack.pop()
            on_stack.discard(node)
            done.add(node)
    # remaining nodes all have positive in-degree, so a cycle must exist
    raise AssertionError("no cycle found among supposedly cyclic nodes")


@dataclass(frozen=True)
class ReportProfile:
    """Declared out-edge sets, agent -> set of (agent, followee) pairs.

    Agents missing from the mapping are taken to report truthfully.  A
    declared set must be a subset of the agent's true out-edges; this is
    enforced by ``apply_report`` against the reference graph.
    """

    out_edges: Mapping[int, frozenset[tuple[int, int]]]

    def __post_init__(self) -> None:
        normalized = {
            int(agent): frozenset((int(u), int(v)) for u, v in declared)
            for agent, declared in self.out_edges.items()
        }
        object.__setattr__(self, "out_edges", normalized)


@dataclass(frozen=True)
class ProgenyTable:
    """Progeny sizes (and optionally the progeny sets) for every agent."""

    counts: Mapping[int, int]
    sets: Mapping[int, frozenset[int]] | None = None


@dataclass(frozen=True)
class InducedSubgraph:
    """A relabeled induced subgraph plus the mapping back to original IDs.

    ``original_ids[new_id - 1]`` is the agent the relabeled ``new_id``
    stands for; relabeling assigns 1..m to the members in ascending order
    of their original IDs.
    """

    graph: Dag
    original_ids: tuple[int, ...]

    def original_of(self, new_id: int) -> int:
        return self.original_ids[new_id - 1]


def _require_agent(dag: Dag, agent: int) -> None:
    if not isinstance(agent, int) or not 1 <= agent <= dag.n:
        raise UnknownAgentError(f"agent {agent!r} not in 1..{dag.n}")


def parse_edge_list(text: str | IO[str]) -> Dag:
    """Parse the edge-list format into a validated Dag.

    Raises MalformedLineError, AgentRangeError, SelfLoopError,
    DuplicateEdgeError or CycleError, each naming the offending line or
    edge.
    """
    if hasattr(text, "read"):
        text = text.read()
    n: int | None = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(str(text).splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            try:
                n = int(line)
            except ValueError:
                raise MalformedLineError(
                    f"line {lineno}: expected the agent count, got {raw!r}"
                ) from None
            if n < 1:
                raise AgentRangeError(f"line {lineno}: agent count must be >= 1, got {n}")
            continue
        parts = line.split()
        if len(parts) != 2:
            raise MalformedLineError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise MalformedLineError(f"line {lineno}: non-integer agent ID in {raw!r}") from None
        if not (1 <= u <= n and 1 <= v <= n):
            raise AgentRangeError(f"line {lineno}: edge ({u}, {v}) outside 1..{n}")
        if u == v:
            raise SelfLoopError(f"line {lineno}: self-loop at agent {u}")
        if (u, v) in seen:
            raise DuplicateEdgeError(f"line {lineno}: duplicate edge ({u}, {v})")
        seen.add((u, v))
        edges.append((u, v))
    if n is None:
        raise MalformedLineError("empty input: missing agent count line")
    return Dag(n, frozenset(edges))


def serialize(dag: Dag, fmt: str = "edge-list") -> str:
    """Render a Dag canonically (edges sorted, trailing newline).

    ``edge-list`` round-trips through ``parse_edge_list``; ``dot`` is for
    visualization only.
    """
    if fmt == "edge-list":
        lines = [str(dag.n)] + [f"{u} {v}" for u, v in dag.sorted_edges()]
        return "\n".join(lines) + "\n"
    if fmt == "dot":
        lines = ["digraph {"]
        lines += [f"  {i};" for i in dag.agents]
        lines += [f"  {u} -> {v};" for u, v in dag.sorted_edges()]
        lines.append("}")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown serialization format {fmt!r}")


def out_edges(dag: Dag, agent: int) -> frozenset[tuple[int, int]]:
    """The agent's true out-edge set (the edges she could hide)."""
    _require_agent(dag, agent)
    return frozenset(e for e in dag.edges if e[0] == agent)


def remove_out_edges(dag: Dag, agent: int) -> Dag:
    """The graph with exactly this agent's out-edges deleted."""
    _require_agent(dag, agent)
    kept = frozenset(e for e in dag.edges if e[0] != agent)
    if len(kept) == len(dag.edges):
        return dag
    return _dag_unchecked(dag.n, kept)


def apply_report(truth: Dag, report: ReportProfile) -> Dag:
    """The graph built from declared out-edges, truthful where undeclared.

    Raises ReportError if a declared edge is not one of the declaring
    agent's true out-edges.
    """
    true_out: dict[int, set[tuple[int, int]]] = {}
    for u, v in truth.edges:
        true_out.setdefault(u, set()).add((u, v))
    replaced: set[int] = set()
    declared_edges: set[tuple[int, int]] = set()
    for agent, declared in report.out_edges.items():
        _require_agent(truth, agent)
        for edge in declared:
            if edge[0] != agent:
                raise ReportError(f"edge {edge} declared by agent {agent} is not her out-edge")
            if edge not in true_out.get(agent, ()):
                raise ReportError(f"declared edge {edge} absent from the true graph")
        replaced.add(agent)
        declared_edges.update(declared)
    kept = {e for e in truth.edges if e[0] not in replaced}
    return _dag_unchecked(truth.n, frozenset(kept | declared_edges))


def progeny(dag: Dag, with_sets: bool = False) -> ProgenyTable:
    """Progeny of every agent by per-agent BFS over reverse adjacency.

    ``counts[i]`` is the number of agents with a directed path to i,
    including i herself, so every count is at least 1.
    """
    into: dict[int, list[int]] = {i: [] for i in dag.agents}
    for u, v in dag.edges:
        into[v].append(u)
    counts: dict[int, int] = {}
    sets: dict[int, frozenset[int]] = {}
    for target in dag.agents:
        visited = {target}
        queue = deque((target,))
        while queue:
            node = queue.popleft()
            for follower in into[node]:
                if follower not in visited:
                    visited.add(follower)
                    queue.append(follower)
        counts[target] = len(visited)
        if with_sets:
            sets[target] = frozenset(visited)
    return ProgenyTable(counts, sets if with_sets else None)


def progeny_subgraph(dag: Dag, agent: int) -> InducedSubgraph:
    """Induced subgraph on the agent's progeny, relabeled 1..m."""
    _require_agent(dag, agent)
    into: dict[int, list[int]] = {i: [] for i in dag.agents}
    for u, v in dag.edges:
        into[v].append(u)
    members = {agent}
    queue = deque((agent,))
    while queue:
        node = queue.popleft()
        for follower in into[node]:
            if follower not in members:
                members.add(follower)
                queue.append(follower)
    ordered = sorted(members)
    relabel = {old: new for new, old in enumerate(ordered, start=1)}
    edges = frozenset(
        (relabel[u], relabel[v]) for u, v in dag.edges if u in members and v in members
    )
    return InducedSubgraph(_dag_unchecked(len(ordered), edges), tuple(ordered))


# ---- bitmask reachability ---------------------------------------------------
#
# Accelerated transitive-closure path used by the influence and mechanism
# hot loops.  Tests pin its counts to the BFS implementation above.

@lru_cache(maxsize=1024)
def _ancestor_masks(dag: Dag) -> tuple[int, ...]:
    """Per agent, the bitmask of her progeny (bit b = agent b+1)."""
    order = _topological_order(dag.n, dag.edges)
    into: dict[int, list[int]] = {i: [] for i in dag.agents}
    for u, v in dag.edges:
        into[v].append(u)
    masks = [0] * (dag.n + 1)
    for v in order:
        m = 1 << (v - 1)
        for u in into[v]:
            m |= masks[u]
        masks[v] = m
    return tuple(masks[1:])


@lru_cache(maxsize=1024)
def _descendant_masks(dag: Dag) -> tuple[int, ...]:
    """Per agent, the bitmask of agents reachable from her."""
    order = _topological_order(dag.n, dag.edges)
    outs: dict[int, list[int]] = {i: [] for i in dag.agents}
    for u, v in dag.edges:
        outs[u].append(v)
    masks = [0] * (dag.n + 1)
    for u in reversed(order):
        m = 1 << (u - 1)
        for v in outs[u]:
            m |= masks[v]
        masks[u] = m
    return tuple(masks[1:])


def _progeny_counts(dag: Dag) -> tuple[int, ...]:
    """Progeny sizes via the bitmask closure, indexed agent-1."""
    return tuple(m.bit_count() for m in _ancestor_masks(dag))
