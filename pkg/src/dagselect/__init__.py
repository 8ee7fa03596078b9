"""Influential-agent selection on follow-relationship DAGs.

Agents report who they follow; the reported graph decides who gets picked.
The geometric mechanism halves probability up the influential ranking,
which makes hiding edges pointless while guaranteeing at least half of the
maximum progeny in expectation.  The package bundles the mechanism and
baselines, brute-force manipulation/fairness verifiers, deterministic
graph families, and the equalized worst-case ceiling numerics.
"""
from .bounds import (
    BoundSolution,
    CeilingReport,
    convergence_table,
    empirical_ceiling_check,
    equalized_ratio,
    harmonic_tail,
    limit_constant,
    solve_equalized_generic,
    solve_equalized_system,
)
from .generators import (
    EnsembleSpec,
    all_labeled_dags,
    chain,
    demo_graph,
    ensemble,
    generate_one,
    gnp_dag,
    random_forest,
    tightness_family,
    upper_bound_graph,
    witness_graph,
    worst_case_graph,
)
from .graph import (
    AgentRangeError,
    CycleError,
    Dag,
    DagError,
    DuplicateEdgeError,
    InducedSubgraph,
    MalformedLineError,
    ProgenyTable,
    ReportError,
    ReportProfile,
    SelfLoopError,
    UnknownAgentError,
    apply_report,
    out_edges,
    parse_edge_list,
    progeny,
    progeny_subgraph,
    remove_out_edges,
    serialize,
)
from .influence import (
    InfluentialSet,
    influential_set,
    is_influential,
    most_influential,
    precedes,
    progeny_set_of,
)
from .mechanisms import (
    MECHANISMS,
    Mechanism,
    RatioReport,
    SelectionDistribution,
    expected_ratio,
    geometric,
    optimal_non_ic,
    uniform,
)
from .verification import (
    DEFAULT_SUBSET_CAP,
    FairnessHarvest,
    FairnessSample,
    FairnessSampleError,
    IcViolation,
    ObservationReport,
    check_fairness,
    check_ic,
    check_ic_all,
    check_influential_growth,
    check_observations,
    check_root_property,
    collect_fairness_samples,
    edge_count_keyed,
    evaluate_fairness,
    mutate_outside,
    replay_violation,
    subset_mode,
    violation_from_json,
)

__version__ = "0.1.0"

__all__ = [
    "AgentRangeError",
    "BoundSolution",
    "CeilingReport",
    "CycleError",
    "Dag",
    "DagError",
    "DEFAULT_SUBSET_CAP",
    "DuplicateEdgeError",
    "EnsembleSpec",
    "FairnessHarvest",
    "FairnessSample",
    "FairnessSampleError",
    "IcViolation",
    "InducedSubgraph",
    "InfluentialSet",
    "MalformedLineError",
    "MECHANISMS",
    "Mechanism",
    "ObservationReport",
    "ProgenyTable",
    "RatioReport",
    "ReportError",
    "ReportProfile",
    "SelectionDistribution",
    "SelfLoopError",
    "UnknownAgentError",
    "all_labeled_dags",
    "apply_report",
    "chain",
    "check_fairness",
    "check_ic",
    "check_ic_all",
    "check_influential_growth",
    "check_observations",
    "check_root_property",
    "collect_fairness_samples",
    "convergence_table",
    "demo_graph",
    "edge_count_keyed",
    "empirical_ceiling_check",
    "ensemble",
    "equalized_ratio",
    "evaluate_fairness",
    "expected_ratio",
    "generate_one",
    "geometric",
    "gnp_dag",
    "harmonic_tail",
    "influential_set",
    "is_influential",
    "limit_constant",
    "most_influential",
    "mutate_outside",
    "optimal_non_ic",
    "out_edges",
    "parse_edge_list",
    "precedes",
    "progeny",
    "progeny_set_of",
    "progeny_subgraph",
    "random_forest",
    "remove_out_edges",
    "replay_violation",
    "serialize",
    "solve_equalized_generic",
    "solve_equalized_system",
    "subset_mode",
    "tightness_family",
    "uniform",
    "upper_bound_graph",
    "violation_from_json",
    "witness_graph",
    "worst_case_graph",
]
