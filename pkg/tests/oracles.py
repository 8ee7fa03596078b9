"""Independent brute-force oracles, deliberately built on networkx so they
share no code with the library paths they check."""
import random

import networkx as nx

from dagselect import Dag, gnp_dag, random_forest, chain
from dagselect.generators import _child_seed


def to_nx(dag: Dag) -> nx.DiGraph:
    g = nx.DiGraph()
    g.add_nodes_from(dag.agents)
    g.add_edges_from(dag.edges)
    return g


def oracle_progeny(dag: Dag) -> dict[int, int]:
    g = to_nx(dag)
    return {i: len(nx.ancestors(g, i)) + 1 for i in dag.agents}


def oracle_progeny_sets(dag: Dag) -> dict[int, frozenset[int]]:
    g = to_nx(dag)
    return {i: frozenset(nx.ancestors(g, i)) | {i} for i in dag.agents}


def oracle_reachable_pairs(dag: Dag) -> int:
    """Number of (ancestor, node) pairs, nodes paired with themselves included."""
    g = to_nx(dag)
    return sum(len(nx.ancestors(g, i)) + 1 for i in dag.agents)


def oracle_influential_members(dag: Dag) -> tuple[tuple[int, int], ...]:
    """Influential agents by the raw definition: delete own out-edges,
    recompute everything, demand the tie-break maximum."""
    members = []
    for i in dag.agents:
        stripped = nx.DiGraph()
        stripped.add_nodes_from(dag.agents)
        stripped.add_edges_from(e for e in dag.edges if e[0] != i)
        p = {j: len(nx.ancestors(stripped, j)) + 1 for j in dag.agents}
        if all((p[i], -i) > (p[j], -j) for j in dag.agents if j != i):
            members.append(i)
    base = oracle_progeny(dag)
    members.sort(key=lambda a: (-base[a], a))
    return tuple((a, base[a]) for a in members)


def oracle_is_acyclic(n: int, edges: set[tuple[int, int]]) -> bool:
    g = nx.DiGraph()
    g.add_nodes_from(range(1, n + 1))
    g.add_edges_from(edges)
    return nx.is_directed_acyclic_graph(g)


def mixed_ensemble(count: int, master_seed: int, max_n: int = 24):
    """Seeded stream of (graph, child_seed) across the three random shapes."""
    for t in range(count):
        child = _child_seed(master_seed, t)
        rng = random.Random(child)
        n = rng.randint(1, max_n)
        family = t % 3
        if family == 0:
            yield gnp_dag(n, rng.choice((0.1, 0.25, 0.5)), rng.getrandbits(60)), child
        elif family == 1:
            yield random_forest(n, rng.getrandbits(60)), child
        else:
            yield chain(n), child
