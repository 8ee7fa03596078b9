"""Selection mechanisms and the expected-progeny ratio evaluator.

A mechanism is any callable ``Dag -> SelectionDistribution``.  Selection
probabilities are exact rationals; the residual mass of selecting nobody
is carried explicitly as ``abstain`` instead of being renormalized away,
because the halving schedule of the geometric mechanism depends on it.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from .graph import Dag, UnknownAgentError, _progeny_counts
from .influence import influential_set, most_influential

_FLOAT_TOTAL_TOL = 1e-12


@dataclass(frozen=True)
class SelectionDistribution:
    """Per-agent selection probabilities plus explicit abstention mass.

    Agents absent from ``probs`` have probability zero.  Probabilities and
    abstention must sum to exactly 1 (rational entries) or to 1 within
    1e-12 when float entries are present.
    """

    probs: Mapping[int, Fraction]
    abstain: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        cleaned = {}
        exact = True
        for agent, q in self.probs.items():
            if isinstance(q, float):
                exact = False
            else:
                q = Fraction(q)
            if not 0 <= q <= 1:
                raise ValueError(f"probability {q} for agent {agent} outside [0, 1]")
            cleaned[int(agent)] = q
        abstain = self.abstain
        if isinstance(abstain, float):
            exact = False
        else:
            abstain = Fraction(abstain)
        if abstain < 0:
            raise ValueError(f"abstention mass {abstain} is negative")
        object.__setattr__(self, "probs", cleaned)
        object.__setattr__(self, "abstain", abstain)
        total = sum(cleaned.values()) + abstain
        if exact:
            if total != 1:
                raise ValueError(f"probabilities and abstention sum to {total}, not 1")
        elif abs(total - 1) > _FLOAT_TOTAL_TOL:
            raise ValueError(f"probabilities and abstention sum to {total}, not 1")

    def probability(self, agent: int) -> Fraction:
        return self.probs.get(agent, Fraction(0))

    def as_json_dict(self) -> dict:
        return {
            "probabilities": {str(a): str(q) for a, q in sorted(self.probs.items())},
            "probabilities_float": {str(a): float(q) for a, q in sorted(self.probs.items())},
            "abstain": str(self.abstain),
            "abstain_float": float(self.abstain),
        }


@dataclass(frozen=True)
class RatioReport:
    """Expected progeny of the selected agent against the maximum progeny."""

    expected_progeny: Fraction
    max_progeny: int
    ratio: Fraction

    def __post_init__(self) -> None:
        if not 0 <= self.ratio <= 1:
            raise ValueError(f"ratio {self.ratio} outside [0, 1]")

    def as_json_dict(self) -> dict:
        return {
            "expected_progeny": str(self.expected_progeny),
            "expected_progeny_float": float(self.expected_progeny),
            "max_progeny": self.max_progeny,
            "ratio": str(self.ratio),
            "ratio_float": float(self.ratio),
        }


Mechanism = Callable[[Dag], SelectionDistribution]


def geometric(dag: Dag) -> SelectionDistribution:
    """Halve probability up the influential ranking.

    With m influential agents ranked s_1 (top) to s_m, member s_j receives
    1/2^(m-j+1): the lowest-ranked gets 1/2, the top gets 1/2^m, nobody is
    selected with the leftover 1/2^m.  Everyone else gets zero.
    """
    members = influential_set(dag).members
    m = len(members)
    probs = {
        agent: Fraction(1, 1 << (m - rank))
        for rank, (agent, _progeny) in enumerate(members)
    }
    return SelectionDistribution(probs, abstain=Fraction(1, 1 << m))


def uniform(dag: Dag) -> SelectionDistribution:
    """Every agent gets 1/n regardless of reports."""
    share = Fraction(1, dag.n)
    return SelectionDistribution({i: share for i in dag.agents})


def optimal_non_ic(dag: Dag) -> SelectionDistribution:
    """Pick the maximum-progeny agent outright.

    Maximizes the ratio on truthful reports but is manipulable: a runner-up
    can hide her out-edges and take over the top spot.
    """
    return SelectionDistribution({most_influential(dag): Fraction(1)})


def expected_ratio(dag: Dag, dist: SelectionDistribution) -> RatioReport:
    """Exact expected progeny of the selected agent over the maximum progeny."""
    counts = _progeny_counts(dag)
    expected = Fraction(0)
    for agent, q in dist.probs.items():
        if not 1 <= agent <= dag.n:
            raise UnknownAgentError(f"distribution names agent {agent}, graph has 1..{dag.n}")
        expected += q * counts[agent - 1]
    max_progeny = max(counts)
    return RatioReport(expected, max_progeny, expected / max_progeny)


MECHANISMS: dict[str, Mechanism] = {
    "geometric": geometric,
    "uniform": uniform,
    "optimal-non-ic": optimal_non_ic,
}
