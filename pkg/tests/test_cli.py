import json

import pytest

from dagselect import demo_graph, parse_edge_list, serialize, upper_bound_graph, witness_graph
from dagselect.cli import main


@pytest.fixture
def demo_file(tmp_path):
    path = tmp_path / "demo.txt"
    path.write_text(serialize(demo_graph()))
    return str(path)


@pytest.fixture
def witness_file(tmp_path):
    path = tmp_path / "witness.txt"
    path.write_text(serialize(witness_graph()))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---- select -------------------------------------------------------------------

def test_select_demo_json(capsys, demo_file):
    code, out, _err = run(capsys, "select", "-i", demo_file)
    assert code == 0
    report = json.loads(out)
    assert report["ratio"] == "5/8"
    assert report["expected_progeny"] == "5"
    assert report["probabilities"] == {"1": "1/4", "2": "1/2"}
    assert report["abstain"] == "1/4"
    assert report["influential_set"] == [
        {"agent": 1, "progeny": 8},
        {"agent": 2, "progeny": 6},
    ]
    assert report["seed"] == 0


def test_select_single_node(capsys, tmp_path):
    path = tmp_path / "one.txt"
    path.write_text("1\n")
    code, out, _err = run(capsys, "select", "-i", str(path))
    assert code == 0
    report = json.loads(out)
    assert report["probabilities"] == {"1": "1/2"}
    assert report["abstain"] == "1/2"


def test_select_cyclic_input_exits_2(capsys, tmp_path):
    path = tmp_path / "cyclic.txt"
    path.write_text("2\n1 2\n2 1\n")
    code, _out, err = run(capsys, "select", "-i", str(path))
    assert code == 2
    assert "closes a cycle" in err


def test_select_missing_file_exits_2(capsys, tmp_path):
    code, _out, err = run(capsys, "select", "-i", str(tmp_path / "absent.txt"))
    assert code == 2
    assert "error" in err


def test_select_unknown_mechanism_exits_3(capsys, demo_file):
    code, _out, err = run(capsys, "select", "-i", demo_file, "--mechanism", "magic")
    assert code == 3
    assert "unknown mechanism" in err


def test_select_unknown_format_exits_3(capsys, demo_file):
    code, _out, _err = run(capsys, "select", "-i", demo_file, "--format", "xml")
    assert code == 3


def test_select_text_and_csv(capsys, demo_file):
    code, out, _err = run(capsys, "select", "-i", demo_file, "--format", "text")
    assert code == 0 and "ratio: 5/8" in out
    code, out, _err = run(capsys, "select", "-i", demo_file, "--format", "csv")
    assert code == 0
    assert out.startswith("# dagselect select seed=0\n")
    assert "ratio,,5/8,0.625" in out


def test_select_output_file(capsys, demo_file, tmp_path):
    target = tmp_path / "report.json"
    code, out, _err = run(capsys, "select", "-i", demo_file, "-o", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["ratio"] == "5/8"


def test_select_deterministic_output(capsys, demo_file):
    _code, first, _err = run(capsys, "select", "-i", demo_file)
    _code, second, _err = run(capsys, "select", "-i", demo_file)
    assert first == second


# ---- verify --------------------------------------------------------------------

def test_verify_ic_geometric_ensemble_passes(capsys):
    code, out, _err = run(
        capsys,
        "verify", "ic",
        "--family", "gnp-dag", "--n", "10", "--p", "0.3",
        "--trials", "40", "--seed", "7",
    )
    assert code == 0
    report = json.loads(out)
    assert report["violations"] == []
    assert report["scope"]["graphs"] == 40
    assert report["exit"] == 0


def test_verify_ic_baseline_fails_on_witness(capsys, witness_file, tmp_path):
    target = tmp_path / "violation.json"
    code, _out, _err = run(
        capsys,
        "verify", "ic", "-i", witness_file,
        "--mechanism", "optimal-non-ic", "-o", str(target),
    )
    assert code == 1
    report = json.loads(target.read_text())
    (violation,) = report["violations"]
    assert violation["agent"] == 2
    assert violation["hidden"] == [[2, 1]]
    assert violation["misreport_prob"] == "1"

    # the emitted counterexample replays
    code, _out, _err = run(capsys, "verify", "--replay", str(target))
    assert code == 0


def test_verify_replay_rejects_tampered_file(capsys, witness_file, tmp_path):
    target = tmp_path / "violation.json"
    run(capsys, "verify", "ic", "-i", witness_file, "--mechanism", "optimal-non-ic",
        "-o", str(target))
    report = json.loads(target.read_text())
    report["violations"][0]["misreport_prob"] = "1/3"
    target.write_text(json.dumps(report))
    code, _out, _err = run(capsys, "verify", "--replay", str(target))
    assert code == 1


def test_verify_fairness_geometric_500_samples(capsys):
    code, out, _err = run(
        capsys, "verify", "fairness", "--trials", "500", "--seed", "11"
    )
    assert code == 0
    report = json.loads(out)
    assert report["failures"] == []
    assert report["scope"]["accepted_samples"] == 500


def test_verify_observations_and_root(capsys):
    code, out, _err = run(
        capsys, "verify", "observations",
        "--family", "random-forest", "--n", "12", "--trials", "30", "--seed", "3",
    )
    assert code == 0 and json.loads(out)["failures"] == []
    code, out, _err = run(
        capsys, "verify", "root",
        "--family", "gnp-dag", "--n", "10", "--p", "0.25", "--trials", "30",
    )
    assert code == 0 and json.loads(out)["failures"] == []


def test_verify_root_uniform_fails(capsys, witness_file):
    code, out, _err = run(
        capsys, "verify", "root", "-i", witness_file, "--mechanism", "uniform"
    )
    assert code == 1
    assert json.loads(out)["failures"][0]["positive_outside"]


def test_verify_requires_mode_or_replay(capsys):
    code, _out, err = run(capsys, "verify")
    assert code == 3 and "mode" in err


def test_verify_unknown_mode_exits_3(capsys):
    code, _out, _err = run(capsys, "verify", "everything")
    assert code == 3


def test_verify_needs_input_or_family(capsys):
    code, _out, err = run(capsys, "verify", "ic")
    assert code == 3
    assert "--family" in err


def test_verify_deterministic(capsys):
    argv = ("verify", "ic", "--family", "gnp-dag", "--n", "8", "--p", "0.3",
            "--trials", "10", "--seed", "5")
    _code, first, _err = run(capsys, *argv)
    _code, second, _err = run(capsys, *argv)
    assert first == second


# ---- eval ----------------------------------------------------------------------

def test_eval_demo(capsys, demo_file):
    code, out, _err = run(capsys, "eval", "-i", demo_file)
    assert code == 0
    report = json.loads(out)
    assert report["min_ratio"] == "5/8"
    assert report["rows"][0]["ratio"] == "5/8"


def test_eval_ensemble_csv(capsys):
    code, out, _err = run(
        capsys, "eval", "--family", "chain", "--n", "6", "--trials", "3",
        "--format", "csv",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[1] == "trial,n,edges,ratio,ratio_float"
    assert len(lines) == 6  # comment + header + 3 trials + min row


# ---- bound ---------------------------------------------------------------------

def test_bound_default_csv(capsys):
    code, out, _err = run(capsys, "bound")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[1] == "k,r_k,gap"
    assert lines[2].startswith("2,0.75,")
    assert lines[-1].startswith("limit,0.59061610914964")


def test_bound_json_rows(capsys):
    code, out, _err = run(capsys, "bound", "--k", "2,10", "--format", "json")
    assert code == 0
    report = json.loads(out)
    assert report["rows"][0] == {"k": 2, "r": 0.75, "gap": 0.75 - report["limit"]}
    assert abs(report["limit"] - 0.5906161) < 5e-8


def test_bound_large_k_row_is_tight(capsys):
    code, out, _err = run(capsys, "bound", "--k", "1000000", "--format", "json")
    assert code == 0
    (row,) = json.loads(out)["rows"]
    assert row["gap"] <= 1e-6


def test_bound_rejects_small_k(capsys):
    code, _out, err = run(capsys, "bound", "--k", "1,5")
    assert code == 2
    assert ">= 2" in err


def test_bound_rejects_garbage_k(capsys):
    code, _out, _err = run(capsys, "bound", "--k", "2,banana")
    assert code == 2


# ---- generate ------------------------------------------------------------------

def test_generate_upper_bound_round_trip(capsys, tmp_path):
    target = tmp_path / "ub.txt"
    code, _out, _err = run(capsys, "generate", "--family", "upper-bound", "--k", "3",
                           "-o", str(target))
    assert code == 0
    assert parse_edge_list(target.read_text()) == upper_bound_graph(3)


def test_generate_gnp_deterministic(capsys):
    argv = ("generate", "--family", "gnp-dag", "--n", "12", "--p", "0.4", "--seed", "9")
    _code, first, _err = run(capsys, *argv)
    _code, second, _err = run(capsys, *argv)
    assert first == second
    parse_edge_list(first)


def test_generate_dot(capsys):
    code, out, _err = run(capsys, "generate", "--family", "chain", "--n", "3",
                          "--format", "dot")
    assert code == 0
    assert out.startswith("digraph {")


def test_generate_unknown_family_exits_3(capsys):
    code, _out, _err = run(capsys, "generate", "--family", "smallworld", "--n", "5")
    assert code == 3


def test_generate_bad_parameters_exit_2(capsys):
    code, _out, _err = run(capsys, "generate", "--family", "upper-bound", "--k", "1")
    assert code == 2
