import dataclasses
from fractions import Fraction

import pytest
from hypothesis import given, settings

from dagselect import (
    Dag,
    FairnessSample,
    FairnessSampleError,
    chain,
    check_fairness,
    check_ic,
    check_ic_all,
    check_influential_growth,
    check_observations,
    check_root_property,
    collect_fairness_samples,
    edge_count_keyed,
    evaluate_fairness,
    geometric,
    influential_set,
    most_influential,
    mutate_outside,
    optimal_non_ic,
    progeny_set_of,
    replay_violation,
    subset_mode,
    uniform,
    upper_bound_graph,
    violation_from_json,
)

from oracles import mixed_ensemble
from strategies import dags


# ---- check_ic ------------------------------------------------------------------

def test_uniform_never_violates(witness):
    assert check_ic_all(uniform, witness) == []


def test_optimal_non_ic_violation_on_witness(witness):
    violation = check_ic(optimal_non_ic, witness, 2)
    assert violation is not None
    assert violation.agent == 2
    assert violation.truthful_prob == 0
    assert violation.misreport == frozenset()
    assert violation.hidden_edges() == [(2, 1)]
    assert violation.misreport_prob == 1
    assert violation.mode == "exhaustive"


def test_geometric_clean_on_witness_exhaustive(witness):
    assert check_ic_all(geometric, witness) == []


def test_violation_soundness_replays(witness):
    violation = check_ic(optimal_non_ic, witness, 2)
    assert replay_violation(violation)


def test_tampered_violation_fails_replay(witness):
    violation = check_ic(optimal_non_ic, witness, 2)
    tampered = dataclasses.replace(violation, misreport_prob=Fraction(1, 3))
    assert not replay_violation(tampered)


def test_violation_json_round_trip(witness):
    violation = check_ic(optimal_non_ic, witness, 2)
    assert violation_from_json(violation.as_json_dict()) == violation
    assert replay_violation(violation_from_json(violation.as_json_dict()))


def test_sampled_mode_when_cap_exceeded():
    # agent 2 has out-degree 2; cap 2 allows only 2^1 subsets exhaustively
    dag = Dag(6, frozenset({(2, 1), (2, 6), (3, 2), (4, 2), (5, 1)}))
    violation = check_ic(optimal_non_ic, dag, 2, subset_cap=2, seed=5)
    assert violation is not None
    assert violation.mode == "sampled"
    assert violation.misreport == frozenset()  # the empty report is always tried
    assert replay_violation(violation)


def test_subset_mode_thresholds():
    assert subset_mode(20) == "exhaustive"
    assert subset_mode(21) == "sampled"
    assert subset_mode(3, subset_cap=8) == "exhaustive"
    assert subset_mode(3, subset_cap=7) == "sampled"


def test_geometric_clean_on_ensemble():
    for dag, seed in mixed_ensemble(150, master_seed=31, max_n=10):
        assert check_ic_all(geometric, dag, seed=seed) == []


def test_optimal_non_ic_violations_exactly_when_runner_up_exists():
    hits = 0
    for dag, seed in mixed_ensemble(150, master_seed=37, max_n=10):
        violations = check_ic_all(optimal_non_ic, dag, seed=seed)
        if len(influential_set(dag)) >= 2:
            assert violations, dag
            hits += 1
            assert all(replay_violation(v) for v in violations)
        else:
            assert violations == [], dag
    assert hits > 10  # the ensemble must actually exercise the violating case


@given(dags(max_n=8))
@settings(max_examples=30)
def test_geometric_clean_property(dag):
    assert check_ic_all(geometric, dag) == []


# ---- influential growth under misreports ----------------------------------------

def test_influential_growth_on_witness(witness):
    assert all(check_influential_growth(witness, agent) for agent in witness.agents)


def test_influential_growth_on_ensemble():
    for dag, seed in mixed_ensemble(100, master_seed=41, max_n=10):
        for agent, _p in influential_set(dag).members:
            assert check_influential_growth(dag, agent, seed=seed)


# ---- mutate_outside ----------------------------------------------------------------

def test_mutate_outside_returns_none_when_progeny_covers_everything():
    assert mutate_outside(upper_bound_graph(4), seed=1) is None
    assert mutate_outside(chain(5), seed=1) is None


def test_mutate_outside_produces_valid_samples():
    # agent 1 holds progeny {1..5}; the chain 8 -> 7 -> 6 sits outside it
    base = Dag(8, frozenset({(2, 1), (3, 1), (4, 1), (5, 1), (7, 6), (8, 7)}))
    found = 0
    for seed in range(30):
        mutated = mutate_outside(base, seed)
        if mutated is None:
            continue
        found += 1
        assert mutated != base
        sample = FairnessSample(base, mutated, most_influential(base))
        assert check_fairness(geometric, sample)
    assert found > 0


def test_mutate_outside_is_deterministic():
    base = Dag(6, frozenset({(2, 1), (3, 1), (5, 4), (6, 4)}))
    assert mutate_outside(base, 123) == mutate_outside(base, 123)


def test_mutated_graph_keeps_influential_set_and_pivot_subgraph():
    base = Dag(6, frozenset({(2, 1), (3, 1), (5, 4), (6, 4)}))
    pivot = most_influential(base)
    inside = progeny_set_of(base, pivot)
    for seed in range(20):
        mutated = mutate_outside(base, seed)
        if mutated is None:
            continue
        assert influential_set(mutated) == influential_set(base)
        assert progeny_set_of(mutated, pivot) == inside
        base_inside = {e for e in base.edges if e[0] in inside and e[1] in inside}
        mut_inside = {e for e in mutated.edges if e[0] in inside and e[1] in inside}
        assert base_inside == mut_inside


# ---- check_fairness -----------------------------------------------------------------

def _harvest(count, seed=99):
    return collect_fairness_samples(count, seed=seed).samples


def test_geometric_is_fair_on_harvested_samples():
    assert all(check_fairness(geometric, s) for s in _harvest(60))


def test_uniform_is_fair_on_harvested_samples():
    assert all(check_fairness(uniform, s) for s in _harvest(30))


def test_edge_count_keyed_control_fails():
    results = [check_fairness(edge_count_keyed, s) for s in _harvest(30)]
    assert not all(results)


def test_evaluate_fairness_fills_probabilities():
    sample = _harvest(1)[0]
    filled = evaluate_fairness(geometric, sample)
    assert filled.base_prob == filled.mutated_prob
    assert filled.base_prob is not None


def test_fairness_sample_validation_rejects_bad_pairs():
    with pytest.raises(FairnessSampleError):
        check_fairness(geometric, FairnessSample(chain(3), chain(4), 1))
    # same n but different influential sets
    with pytest.raises(FairnessSampleError):
        check_fairness(geometric, FairnessSample(chain(3), Dag(3, frozenset()), 1))
    # pivot is not the top agent
    base = Dag(8, frozenset({(2, 1), (3, 1), (4, 1), (5, 1), (7, 6), (8, 7)}))
    mutated = mutate_outside(base, 3)
    assert mutated is not None
    with pytest.raises(FairnessSampleError):
        check_fairness(geometric, FairnessSample(base, mutated, 2))


def test_collect_fairness_samples_counts_discards():
    harvest = collect_fairness_samples(40, seed=5)
    assert len(harvest.samples) == 40
    assert harvest.attempts == 40 + harvest.discarded


# ---- check_root_property ---------------------------------------------------------

def test_geometric_passes_root_property():
    for dag, _seed in mixed_ensemble(120, master_seed=43, max_n=14):
        assert check_root_property(geometric, dag)


def test_optimal_non_ic_passes_root_property(witness):
    assert check_root_property(optimal_non_ic, witness)


def test_uniform_fails_root_property_with_non_influential_agent(witness):
    assert not check_root_property(uniform, witness)


# ---- check_observations -------------------------------------------------------------

def test_observations_on_single_node():
    assert check_observations(Dag(1, frozenset())).all_hold


@pytest.mark.parametrize("k", [2, 5, 20, 50])
def test_observations_on_upper_bound_graphs(k):
    assert check_observations(upper_bound_graph(k)).all_hold


def test_observations_on_ensemble():
    for dag, seed in mixed_ensemble(400, master_seed=47, max_n=14):
        report = check_observations(dag, seed=seed)
        assert report.all_hold, (dag, report)


@given(dags(max_n=9))
@settings(max_examples=40)
def test_observations_property(dag):
    assert check_observations(dag).all_hold
