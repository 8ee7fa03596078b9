"""Brute-force verifiers: manipulation search, fairness, structure checks.

Every verifier takes the mechanism under test as a parameter so the same
machinery exercises both honest mechanisms and deliberately broken
controls.  Counterexamples carry the full graph inline and replay exactly;
enumeration scope (exhaustive vs. sampled) is recorded alongside.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterator

from .generators import _child_seed, gnp_dag
from .graph import (
    Dag,
    ReportProfile,
    _ancestor_masks,
    apply_report,
    out_edges,
)
from .influence import influential_set, is_influential, most_influential, precedes
from .mechanisms import Mechanism, SelectionDistribution, geometric, optimal_non_ic, uniform

# Exhaustive misreport enumeration up to 2^20 subsets (out-degree 20),
# seeded uniform sampling beyond.
DEFAULT_SUBSET_CAP = 1 << 20


class FairnessSampleError(ValueError):
    """A fairness sample whose two graphs fail the required invariants."""


@dataclass(frozen=True)
class IcViolation:
    """A profitable misreport: hiding edges strictly raised the agent's
    selection probability.  ``misreport`` is the declared (kept) out-edge
    set; everything needed to replay the check is included."""

    agent: int
    truthful_prob: Fraction
    misreport: frozenset[tuple[int, int]]
    misreport_prob: Fraction
    graph: Dag
    mechanism: str
    mode: str

    def hidden_edges(self) -> list[tuple[int, int]]:
        return sorted(out_edges(self.graph, self.agent) - self.misreport)

    def as_json_dict(self) -> dict:
        return {
            "kind": "ic_violation",
            "agent": self.agent,
            "truthful_prob": str(self.truthful_prob),
            "misreport": [list(e) for e in sorted(self.misreport)],
            "hidden": [list(e) for e in self.hidden_edges()],
            "misreport_prob": str(self.misreport_prob),
            "graph": {"n": self.graph.n, "edges": [list(e) for e in self.graph.sorted_edges()]},
            "mechanism": self.mechanism,
            "mode": self.mode,
        }


def violation_from_json(data: dict) -> IcViolation:
    graph = Dag(data["graph"]["n"], frozenset(tuple(e) for e in data["graph"]["edges"]))
    return IcViolation(
        agent=int(data["agent"]),
        truthful_prob=Fraction(data["truthful_prob"]),
        misreport=frozenset(tuple(e) for e in data["misreport"]),
        misreport_prob=Fraction(data["misreport_prob"]),
        graph=graph,
        mechanism=data["mechanism"],
        mode=data.get("mode", "exhaustive"),
    )


@dataclass(frozen=True)
class FairnessSample:
    """Two graphs that must give the pivot agent identical probability:
    same size, same influential set, same induced subgraph on the pivot's
    progeny; they differ only outside it."""

    base: Dag
    mutated: Dag
    pivot: int
    base_prob: Fraction | None = None
    mutated_prob: Fraction | None = None

    def as_json_dict(self) -> dict:
        return {
            "kind": "fairness_sample",
            "pivot": self.pivot,
            "base": {"n": self.base.n, "edges": [list(e) for e in self.base.sorted_edges()]},
            "mutated": {
                "n": self.mutated.n,
                "edges": [list(e) for e in self.mutated.sorted_edges()],
            },
            "base_prob": None if self.base_prob is None else str(self.base_prob),
            "mutated_prob": None if self.mutated_prob is None else str(self.mutated_prob),
        }


@dataclass(frozen=True)
class ObservationReport:
    """Three structural facts about the influential set of one graph:
    members lie on a common path (nesting), the top member is a sink with
    the maximum progeny, and non-influential agents stay non-influential
    under every enumerated misreport."""

    path_nesting: bool
    top_is_sink_and_max: bool
    misreport_closed: bool

    @property
    def all_hold(self) -> bool:
        return self.path_nesting and self.top_is_sink_and_max and self.misreport_closed


def _mechanism_name(mechanism: Mechanism) -> str:
    return getattr(mechanism, "__name__", str(mechanism))


def _subset_masks(degree: int, subset_cap: int, seed: int, task: int) -> Iterator[int]:
    """Bitmasks of strict out-edge subsets: all of them when 2^degree fits
    under the cap, otherwise the empty set plus ``subset_cap`` seeded
    uniform draws."""
    full = (1 << degree) - 1
    if 1 << degree <= subset_cap:
        yield from range(full)
        return
    yield 0
    rng = random.Random(_child_seed(seed, task))
    produced = 0
    while produced < subset_cap:
        mask = rng.getrandbits(degree)
        if mask == full:
            continue
        yield mask
        produced += 1


def subset_mode(degree: int, subset_cap: int = DEFAULT_SUBSET_CAP) -> str:
    """Whether misreports of an agent with this out-degree get enumerated
    exhaustively or sampled under the cap."""
    return "exhaustive" if 1 << degree <= subset_cap else "sampled"


def check_ic(
    mechanism: Mechanism,
    dag: Dag,
    agent: int,
    subset_cap: int = DEFAULT_SUBSET_CAP,
    seed: int = 0,
) -> IcViolation | None:
    """Search the agent's misreports for one that strictly raises her
    probability; returns the first violation in enumeration order."""
    own = sorted(out_edges(dag, agent))
    degree = len(own)
    if degree == 0:
        return None
    truthful = mechanism(dag).probability(agent)
    mode = subset_mode(degree, subset_cap)
    for mask in _subset_masks(degree, subset_cap, seed, agent):
        kept = frozenset(own[b] for b in range(degree) if (mask >> b) & 1)
        manipulated = apply_report(dag, ReportProfile({agent: kept}))
        prob = mechanism(manipulated).probability(agent)
        if prob > truthful:
            return IcViolation(agent, truthful, kept, prob, dag, _mechanism_name(mechanism), mode)
    return None


def check_ic_all(
    mechanism: Mechanism,
    dag: Dag,
    subset_cap: int = DEFAULT_SUBSET_CAP,
    seed: int = 0,
) -> list[IcViolation]:
    """One manipulation search per agent; an empty list certifies the
    instance at the enumerated scope."""
    violations = []
    for agent in dag.agents:
        found = check_ic(mechanism, dag, agent, subset_cap, seed)
        if found is not None:
            violations.append(found)
    return violations


def replay_violation(violation: IcViolation) -> bool:
    """Re-run the mechanism on both graphs and confirm the recorded
    probabilities, including that the misreport strictly profits."""
    mechanism = _RESOLVABLE.get(violation.mechanism.replace("-", "_"))
    if mechanism is None:
        raise ValueError(f"cannot replay unknown mechanism {violation.mechanism!r}")
    truthful = mechanism(violation.graph).probability(violation.agent)
    manipulated = apply_report(violation.graph, ReportProfile({violation.agent: violation.misreport}))
    mis = mechanism(manipulated).probability(violation.agent)
    return (
        truthful == violation.truthful_prob
        and mis == violation.misreport_prob
        and mis > truthful
    )


def check_influential_growth(
    dag: Dag,
    agent: int,
    subset_cap: int = DEFAULT_SUBSET_CAP,
    seed: int = 0,
) -> bool:
    """Hiding edges never removes influential agents ranked below the
    manipulator.

    This is the structural reason the geometric mechanism is manipulation
    proof: the manipulator's rank distance from the bottom never shrinks,
    so her halved probability never grows.
    """
    own = sorted(out_edges(dag, agent))
    degree = len(own)
    if degree == 0:
        return True
    base_counts = {a: p for a, p in influential_set(dag).members}
    p_agent = len(_progeny_bits(dag, agent))
    base_lower = {
        a for a, p in base_counts.items() if a != agent and precedes(p_agent, agent, p, a)
    }
    for mask in _subset_masks(degree, subset_cap, seed, agent):
        kept = frozenset(own[b] for b in range(degree) if (mask >> b) & 1)
        manipulated = apply_report(dag, ReportProfile({agent: kept}))
        after = {a: p for a, p in influential_set(manipulated).members}
        lower = {
            a for a, p in after.items() if a != agent and precedes(p_agent, agent, p, a)
        }
        if not base_lower <= lower:
            return False
    return True


def _progeny_bits(dag: Dag, agent: int) -> frozenset[int]:
    mask = _ancestor_masks(dag)[agent - 1]
    return frozenset(b + 1 for b in range(dag.n) if (mask >> b) & 1)


def _induced_edges(dag: Dag, members: frozenset[int]) -> frozenset[tuple[int, int]]:
    return frozenset(e for e in dag.edges if e[0] in members and e[1] in members)


def mutate_outside(dag: Dag, seed: int) -> Dag | None:
    """Random single-edge mutation strictly outside the top agent's progeny.

    Adds or removes one edge whose endpoints both lie outside the pivot's
    progeny, keeping acyclicity, then re-validates that the influential
    set and the pivot's progeny subgraph are untouched.  Returns None when
    no candidate move exists or the mutation broke the invariants.
    """
    pivot = most_influential(dag)
    inside = _progeny_bits(dag, pivot)
    outside = [v for v in dag.agents if v not in inside]
    if len(outside) < 2:
        return None
    ancestors = _ancestor_masks(dag)
    moves: list[tuple[str, tuple[int, int]]] = []
    outside_set = set(outside)
    for edge in dag.sorted_edges():
        if edge[0] in outside_set and edge[1] in outside_set:
            moves.append(("del", edge))
    for u in outside:
        for v in outside:
            if u == v or (u, v) in dag.edges:
                continue
            # adding u -> v is safe unless v already reaches u
            if (ancestors[u - 1] >> (v - 1)) & 1:
                continue
            moves.append(("add", (u, v)))
    if not moves:
        return None
    action, edge = random.Random(seed).choice(moves)
    if action == "del":
        mutated = Dag(dag.n, dag.edges - {edge})
    else:
        mutated = Dag(dag.n, dag.edges | {edge})
    if influential_set(mutated) != influential_set(dag):
        return None
    if _progeny_bits(mutated, pivot) != inside:
        return None
    if _induced_edges(mutated, inside) != _induced_edges(dag, inside):
        return None
    return mutated


def _validate_fairness_sample(sample: FairnessSample) -> None:
    if sample.base.n != sample.mutated.n:
        raise FairnessSampleError("graphs differ in agent count")
    base_set = influential_set(sample.base)
    if base_set != influential_set(sample.mutated):
        raise FairnessSampleError("graphs differ in influential set")
    if sample.pivot != base_set.top():
        raise FairnessSampleError(f"pivot {sample.pivot} is not the top influential agent")
    inside = _progeny_bits(sample.base, sample.pivot)
    if inside != _progeny_bits(sample.mutated, sample.pivot):
        raise FairnessSampleError("graphs differ in the pivot's progeny")
    if _induced_edges(sample.base, inside) != _induced_edges(sample.mutated, inside):
        raise FairnessSampleError("graphs differ inside the pivot's progeny subgraph")


def check_fairness(mechanism: Mechanism, sample: FairnessSample) -> bool:
    """Exact equality of the pivot's probability across the sample pair.

    Raises FairnessSampleError when the sample itself is invalid, which
    indicates a generator bug rather than a mechanism failure.
    """
    _validate_fairness_sample(sample)
    return mechanism(sample.base).probability(sample.pivot) == mechanism(
        sample.mutated
    ).probability(sample.pivot)


def evaluate_fairness(mechanism: Mechanism, sample: FairnessSample) -> FairnessSample:
    """The sample with both pivot probabilities filled in (for reports)."""
    _validate_fairness_sample(sample)
    return replace(
        sample,
        base_prob=mechanism(sample.base).probability(sample.pivot),
        mutated_prob=mechanism(sample.mutated).probability(sample.pivot),
    )


@dataclass(frozen=True)
class FairnessHarvest:
    samples: tuple[FairnessSample, ...]
    attempts: int
    discarded: int


def collect_fairness_samples(
    count: int,
    seed: int = 0,
    max_attempts: int | None = None,
) -> FairnessHarvest:
    """Mutation-and-filter harvest of valid fairness sample pairs.

    Draws random base graphs, mutates outside the pivot's progeny, keeps
    the pairs that survive re-validation and counts the discards.
    """
    if max_attempts is None:
        max_attempts = 80 * count
    samples: list[FairnessSample] = []
    attempts = 0
    while len(samples) < count and attempts < max_attempts:
        rng = random.Random(_child_seed(seed, attempts))
        attempts += 1
        n = rng.randint(5, 28)
        p = rng.choice((0.1, 0.2, 0.35))
        base = gnp_dag(n, p, rng.getrandbits(60))
        mutated = mutate_outside(base, rng.getrandbits(60))
        if mutated is None:
            continue
        samples.append(FairnessSample(base, mutated, most_influential(base)))
    if len(samples) < count:
        raise RuntimeError(
            f"collected only {len(samples)}/{count} fairness samples in {attempts} attempts"
        )
    return FairnessHarvest(tuple(samples), attempts, attempts - len(samples))


def check_root_property(mechanism: Mechanism, dag: Dag) -> bool:
    """Positive probability only inside the influential set."""
    members = set(influential_set(dag).agents)
    dist = mechanism(dag)
    return all(q == 0 for agent, q in dist.probs.items() if agent not in members)


def check_observations(dag: Dag, subset_cap: int = 256, seed: int = 0) -> ObservationReport:
    """Check the three structural facts on one graph.

    The misreport-closure check enumerates each non-influential agent's
    out-edge subsets exhaustively up to the cap and samples beyond it.
    """
    members = influential_set(dag).members
    ancestors = _ancestor_masks(dag)
    nesting = all(
        (ancestors[members[i][0] - 1] >> (members[j][0] - 1)) & 1
        for i in range(len(members))
        for j in range(i + 1, len(members))
    )
    top, top_progeny = members[0]
    counts = tuple(m.bit_count() for m in ancestors)
    top_ok = all(e[0] != top for e in dag.edges) and all(
        precedes(top_progeny, top, counts[j - 1], j) for j in dag.agents if j != top
    )
    member_ids = {a for a, _ in members}
    closed = True
    for agent in dag.agents:
        if agent in member_ids:
            continue
        own = sorted(out_edges(dag, agent))
        if not own:
            continue
        for mask in _subset_masks(len(own), subset_cap, seed, agent):
            kept = frozenset(own[b] for b in range(len(own)) if (mask >> b) & 1)
            manipulated = apply_report(dag, ReportProfile({agent: kept}))
            if is_influential(manipulated, agent):
                closed = False
                break
        if not closed:
            break
    return ObservationReport(nesting, top_ok, closed)


def edge_count_keyed(dag: Dag) -> SelectionDistribution:
    """Deliberately unfair control: ties the top agent's probability to the
    total edge count, so any outside edge change shifts it."""
    share = Fraction(1, len(dag.edges) + 2)
    return SelectionDistribution({most_influential(dag): share}, abstain=1 - share)


_RESOLVABLE: dict[str, Mechanism] = {
    "geometric": geometric,
    "uniform": uniform,
    "optimal_non_ic": optimal_non_ic,
    "edge_count_keyed": edge_count_keyed,
}
