"""Command-line front end.

Subcommands: select, verify, eval, bound, generate.  Exit codes are
CI-friendly: 0 = pass, 1 = a property violation was found, 2 = input
error, 3 = configuration error.  All reports embed the seed, and an
identical invocation produces byte-identical output.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Iterable

from .bounds import convergence_table, limit_constant
from .generators import FAMILIES, EnsembleSpec, generate_one, _child_seed
from .graph import Dag, DagError, parse_edge_list, serialize
from .influence import influential_set, most_influential
from .mechanisms import MECHANISMS, Mechanism, expected_ratio
from .verification import (
    DEFAULT_SUBSET_CAP,
    FairnessSample,
    check_fairness,
    check_ic_all,
    check_observations,
    check_root_property,
    collect_fairness_samples,
    evaluate_fairness,
    mutate_outside,
    replay_violation,
    subset_mode,
    violation_from_json,
    _RESOLVABLE,
)

VERIFY_MODES = ("ic", "fairness", "observations", "root")


class _InputError(Exception):
    code = 2


class _ConfigError(Exception):
    code = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dagselect",
        description="Influential-agent selection on DAGs: mechanisms, verifiers, bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, fmt_default: str = "json") -> None:
        p.add_argument("-i", "--input", help="edge-list file, or '-' for stdin")
        p.add_argument("--mechanism", default="geometric", help="geometric | uniform | optimal-non-ic")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trials", type=int, default=100)
        p.add_argument("--format", dest="fmt", default=fmt_default, help="json | csv | text")
        p.add_argument("-o", "--output", help="write the report here instead of stdout")
        p.add_argument("--subset-cap", type=int, default=None, help="misreport enumeration cap")
        p.add_argument("--replay", help="re-check a previously emitted counterexample file")
        p.add_argument("--family", help="|".join(FAMILIES))
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--p", type=float, default=None)
        p.add_argument("--k", default=None, help="family parameter (bound: comma-separated list)")
        p.add_argument("--j", type=int, default=None)

    add_common(sub.add_parser("select", help="run a mechanism on one graph"))
    verify = sub.add_parser("verify", help="search for property violations")
    verify.add_argument("mode", nargs="?", choices=None, help="|".join(VERIFY_MODES))
    add_common(verify)
    add_common(sub.add_parser("eval", help="expected-ratio evaluation"))
    add_common(sub.add_parser("bound", help="equalized-ratio convergence table"), fmt_default="csv")
    generate = sub.add_parser("generate", help="write a family graph as an edge list")
    add_common(generate, fmt_default="edge-list")
    return parser


def _check_format(fmt: str, allowed: tuple[str, ...] = ("json", "csv", "text")) -> str:
    if fmt not in allowed:
        raise _ConfigError(f"unknown format {fmt!r}; choose from {', '.join(allowed)}")
    return fmt


def _mechanism(name: str) -> Mechanism:
    try:
        return MECHANISMS[name]
    except KeyError:
        raise _ConfigError(
            f"unknown mechanism {name!r}; choose from {', '.join(sorted(MECHANISMS))}"
        ) from None


def _read_graph(args: argparse.Namespace) -> Dag:
    if not args.input:
        raise _ConfigError("an input graph is required (-i FILE or '-' for stdin)")
    if args.input == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(args.input, "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as exc:
            raise _InputError(f"cannot read {args.input}: {exc}") from None
    try:
        return parse_edge_list(text)
    except DagError as exc:
        raise _InputError(str(exc)) from None


def _ensemble_spec(args: argparse.Namespace) -> EnsembleSpec:
    if not args.family:
        raise _ConfigError("either -i/--input or --family is required")
    if args.family not in FAMILIES:
        raise _ConfigError(f"unknown family {args.family!r}; choose from {', '.join(FAMILIES)}")
    k = None
    if args.k is not None:
        try:
            k = int(args.k)
        except ValueError:
            raise _InputError(f"--k must be an integer, got {args.k!r}") from None
    try:
        spec = EnsembleSpec(args.family, seed=args.seed, n=args.n, p=args.p, k=k, j=args.j)
        generate_one(spec, 0)  # fail fast on bad parameters
    except ValueError as exc:
        raise _InputError(str(exc)) from None
    return spec


def _graphs(args: argparse.Namespace) -> list[tuple[int, Dag]]:
    """(trial index, graph) pairs from -i (one graph) or a family spec."""
    if args.input:
        return [(0, _read_graph(args))]
    spec = _ensemble_spec(args)
    if args.trials < 1:
        raise _InputError(f"--trials must be >= 1, got {args.trials}")
    try:
        return [(t, generate_one(spec, t)) for t in range(args.trials)]
    except ValueError as exc:
        raise _InputError(str(exc)) from None


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _json_text(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + "\n"


def _csv_lines(header: str, rows: Iterable[Iterable[object]], seed: int, command: str) -> str:
    lines = [f"# dagselect {command} seed={seed}", header]
    for row in rows:
        lines.append(",".join("" if cell is None else str(cell) for cell in row))
    return "\n".join(lines) + "\n"


# ---- select ------------------------------------------------------------------

def cmd_select(args: argparse.Namespace) -> int:
    fmt = _check_format(args.fmt)
    mechanism = _mechanism(args.mechanism)
    graph = _read_graph(args)
    members = influential_set(graph)
    dist = mechanism(graph)
    ratio = expected_ratio(graph, dist)
    report = {
        "command": "select",
        "mechanism": args.mechanism,
        "seed": args.seed,
        "n": graph.n,
        "influential_set": [{"agent": a, "progeny": p} for a, p in members.members],
        **dist.as_json_dict(),
        **ratio.as_json_dict(),
    }
    if fmt == "json":
        _emit(_json_text(report), args.output)
    elif fmt == "csv":
        rows: list[tuple[object, ...]] = [("n", None, graph.n, graph.n)]
        rows += [("influential", a, p, p) for a, p in members.members]
        rows += [
            ("probability", a, str(q), float(q)) for a, q in sorted(dist.probs.items())
        ]
        rows.append(("abstain", None, str(dist.abstain), float(dist.abstain)))
        rows.append(
            ("expected_progeny", None, str(ratio.expected_progeny), float(ratio.expected_progeny))
        )
        rows.append(("max_progeny", None, ratio.max_progeny, ratio.max_progeny))
        rows.append(("ratio", None, str(ratio.ratio), float(ratio.ratio)))
        _emit(_csv_lines("field,agent,value,value_float", rows, args.seed, "select"), args.output)
    else:
        lines = [
            f"mechanism: {args.mechanism}",
            f"seed: {args.seed}",
            f"n: {graph.n}",
            "influential set: "
            + ", ".join(f"{a} (progeny {p})" for a, p in members.members),
            "probabilities:",
        ]
        lines += [f"  {a}: {q} ({float(q)})" for a, q in sorted(dist.probs.items())]
        lines += [
            f"abstain: {dist.abstain} ({float(dist.abstain)})",
            f"expected progeny: {ratio.expected_progeny}",
            f"max progeny: {ratio.max_progeny}",
            f"ratio: {ratio.ratio} ({float(ratio.ratio)})",
        ]
        _emit("\n".join(lines) + "\n", args.output)
    return 0


# ---- verify ------------------------------------------------------------------

def _replay_file(path: str) -> int:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            data = json.load(handle)
    except (OSError, json.JSONDecodeError) as exc:
        raise _InputError(f"cannot read replay file {path}: {exc}") from None
    if isinstance(data, dict) and ("violations" in data or "failures" in data):
        items = list(data.get("violations", [])) + list(data.get("failures", []))
    else:
        items = [data]
    if not items:
        raise _InputError(f"{path} contains no counterexamples to replay")
    for item in items:
        kind = item.get("kind")
        if kind == "ic_violation":
            try:
                ok = replay_violation(violation_from_json(item))
            except (KeyError, ValueError, DagError) as exc:
                raise _InputError(f"malformed counterexample: {exc}") from None
            if not ok:
                return 1
        elif kind == "fairness_failure":
            try:
                mech = _RESOLVABLE[item["mechanism"].replace("-", "_")]
                base = Dag(item["base"]["n"], frozenset(tuple(e) for e in item["base"]["edges"]))
                mutated = Dag(
                    item["mutated"]["n"], frozenset(tuple(e) for e in item["mutated"]["edges"])
                )
                pivot = int(item["pivot"])
                base_prob = mech(base).probability(pivot)
                mutated_prob = mech(mutated).probability(pivot)
            except (KeyError, ValueError, DagError) as exc:
                raise _InputError(f"malformed counterexample: {exc}") from None
            if (
                str(base_prob) != item["base_prob"]
                or str(mutated_prob) != item["mutated_prob"]
                or base_prob == mutated_prob
            ):
                return 1
        else:
            raise _InputError(f"unknown counterexample kind {kind!r}")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    _check_format(args.fmt)
    if args.replay:
        return _replay_file(args.replay)
    if not args.mode:
        raise _ConfigError(f"verify needs a mode: {', '.join(VERIFY_MODES)}")
    if args.mode not in VERIFY_MODES:
        raise _ConfigError(f"unknown verify mode {args.mode!r}; choose from {', '.join(VERIFY_MODES)}")
    mechanism = _mechanism(args.mechanism)
    if args.mode == "ic":
        return _verify_ic(args, mechanism)
    if args.mode == "fairness":
        return _verify_fairness(args, mechanism)
    if args.mode == "observations":
        return _verify_observations(args)
    return _verify_root(args, mechanism)


def _verify_report(args: argparse.Namespace, report: dict, exit_code: int) -> int:
    report["exit"] = exit_code
    fmt = args.fmt
    if fmt == "json":
        _emit(_json_text(report), args.output)
    elif fmt == "csv":
        rows = [(key, json.dumps(value, sort_keys=True)) for key, value in sorted(report.items())]
        _emit(_csv_lines("key,value", rows, args.seed, "verify"), args.output)
    else:
        lines = [f"{key}: {json.dumps(value, sort_keys=True)}" for key, value in sorted(report.items())]
        _emit("\n".join(lines) + "\n", args.output)
    return exit_code


def _verify_ic(args: argparse.Namespace, mechanism: Mechanism) -> int:
    cap = args.subset_cap if args.subset_cap is not None else DEFAULT_SUBSET_CAP
    graphs = _graphs(args)
    violations = []
    exhaustive = sampled = 0
    for trial, graph in graphs:
        for agent in graph.agents:
            degree = sum(1 for e in graph.edges if e[0] == agent)
            if subset_mode(degree, cap) == "exhaustive":
                exhaustive += 1
            else:
                sampled += 1
        for violation in check_ic_all(mechanism, graph, cap, args.seed):
            violations.append({"trial": trial, **violation.as_json_dict()})
    report = {
        "command": "verify",
        "mode": "ic",
        "mechanism": args.mechanism,
        "seed": args.seed,
        "scope": {
            "graphs": len(graphs),
            "subset_cap": cap,
            "agents_exhaustive": exhaustive,
            "agents_sampled": sampled,
        },
        "violations": violations,
    }
    return _verify_report(args, report, 1 if violations else 0)


def _verify_fairness(args: argparse.Namespace, mechanism: Mechanism) -> int:
    failures = []
    accepted = 0
    discarded = 0
    if args.input:
        base = _read_graph(args)
        pivot = most_influential(base)
        samples = []
        for trial in range(args.trials):
            mutated = mutate_outside(base, _child_seed(args.seed, trial))
            if mutated is None:
                discarded += 1
                continue
            samples.append(FairnessSample(base, mutated, pivot))
    else:
        try:
            harvest = collect_fairness_samples(args.trials, args.seed)
        except RuntimeError as exc:
            raise _InputError(str(exc)) from None
        samples = list(harvest.samples)
        discarded = harvest.discarded
    for sample in samples:
        accepted += 1
        if not check_fairness(mechanism, sample):
            filled = evaluate_fairness(mechanism, sample)
            failures.append(
                {
                    "kind": "fairness_failure",
                    "mechanism": args.mechanism,
                    "pivot": filled.pivot,
                    "base": {"n": filled.base.n, "edges": [list(e) for e in filled.base.sorted_edges()]},
                    "mutated": {
                        "n": filled.mutated.n,
                        "edges": [list(e) for e in filled.mutated.sorted_edges()],
                    },
                    "base_prob": str(filled.base_prob),
                    "mutated_prob": str(filled.mutated_prob),
                }
            )
    report = {
        "command": "verify",
        "mode": "fairness",
        "mechanism": args.mechanism,
        "seed": args.seed,
        "scope": {"accepted_samples": accepted, "discarded": discarded},
        "failures": failures,
    }
    return _verify_report(args, report, 1 if failures else 0)


def _verify_observations(args: argparse.Namespace) -> int:
    cap = args.subset_cap if args.subset_cap is not None else 256
    graphs = _graphs(args)
    failures = []
    for trial, graph in graphs:
        result = check_observations(graph, cap, args.seed)
        if not result.all_hold:
            failures.append(
                {
                    "trial": trial,
                    "graph": {"n": graph.n, "edges": [list(e) for e in graph.sorted_edges()]},
                    "path_nesting": result.path_nesting,
                    "top_is_sink_and_max": result.top_is_sink_and_max,
                    "misreport_closed": result.misreport_closed,
                }
            )
    report = {
        "command": "verify",
        "mode": "observations",
        "seed": args.seed,
        "scope": {"graphs": len(graphs), "subset_cap": cap},
        "failures": failures,
    }
    return _verify_report(args, report, 1 if failures else 0)


def _verify_root(args: argparse.Namespace, mechanism: Mechanism) -> int:
    graphs = _graphs(args)
    failures = []
    for trial, graph in graphs:
        if not check_root_property(mechanism, graph):
            members = set(influential_set(graph).agents)
            outside = sorted(
                agent
                for agent, q in mechanism(graph).probs.items()
                if q > 0 and agent not in members
            )
            failures.append(
                {
                    "trial": trial,
                    "graph": {"n": graph.n, "edges": [list(e) for e in graph.sorted_edges()]},
                    "positive_outside": outside,
                }
            )
    report = {
        "command": "verify",
        "mode": "root",
        "mechanism": args.mechanism,
        "seed": args.seed,
        "scope": {"graphs": len(graphs)},
        "failures": failures,
    }
    return _verify_report(args, report, 1 if failures else 0)


# ---- eval --------------------------------------------------------------------

def cmd_eval(args: argparse.Namespace) -> int:
    fmt = _check_format(args.fmt)
    mechanism = _mechanism(args.mechanism)
    graphs = _graphs(args)
    rows = []
    ratios = []
    for trial, graph in graphs:
        ratio = expected_ratio(graph, mechanism(graph))
        ratios.append(ratio.ratio)
        rows.append(
            {
                "trial": trial,
                "n": graph.n,
                "edges": len(graph.edges),
                "ratio": str(ratio.ratio),
                "ratio_float": float(ratio.ratio),
            }
        )
    min_ratio = min(ratios)
    mean_ratio = sum(ratios, Fraction(0)) / len(ratios)
    report = {
        "command": "eval",
        "mechanism": args.mechanism,
        "seed": args.seed,
        "trials": len(rows),
        "rows": rows,
        "min_ratio": str(min_ratio),
        "min_ratio_float": float(min_ratio),
        "mean_ratio_float": float(mean_ratio),
    }
    if fmt == "json":
        _emit(_json_text(report), args.output)
    elif fmt == "csv":
        csv_rows = [(r["trial"], r["n"], r["edges"], r["ratio"], r["ratio_float"]) for r in rows]
        csv_rows.append(("min", None, None, str(min_ratio), float(min_ratio)))
        _emit(_csv_lines("trial,n,edges,ratio,ratio_float", csv_rows, args.seed, "eval"), args.output)
    else:
        lines = [f"mechanism: {args.mechanism}", f"seed: {args.seed}"]
        lines += [f"trial {r['trial']}: n={r['n']} ratio={r['ratio']} ({r['ratio_float']})" for r in rows]
        lines.append(f"min ratio: {min_ratio} ({float(min_ratio)})")
        _emit("\n".join(lines) + "\n", args.output)
    return 0


# ---- bound -------------------------------------------------------------------

def cmd_bound(args: argparse.Namespace) -> int:
    fmt = _check_format(args.fmt)
    raw = args.k if args.k is not None else "2,3,4,5,10,100,1000"
    try:
        ks = [int(part) for part in str(raw).split(",") if part.strip()]
    except ValueError:
        raise _InputError(f"--k must be a comma-separated integer list, got {raw!r}") from None
    if not ks:
        raise _InputError("--k produced an empty list")
    if min(ks) < 2:
        raise _InputError(f"every k must be >= 2, got {min(ks)}")
    rows = convergence_table(ks)
    limit = limit_constant()
    if fmt == "json":
        report = {
            "command": "bound",
            "seed": args.seed,
            "rows": [{"k": k, "r": r, "gap": gap} for k, r, gap in rows],
            "limit": limit,
        }
        _emit(_json_text(report), args.output)
    elif fmt == "csv":
        csv_rows: list[tuple[object, ...]] = [(k, repr(r), repr(gap)) for k, r, gap in rows]
        csv_rows.append(("limit", repr(limit), repr(0.0)))
        _emit(_csv_lines("k,r_k,gap", csv_rows, args.seed, "bound"), args.output)
    else:
        lines = [f"seed: {args.seed}"]
        lines += [f"k={k}: r={r!r} gap={gap!r}" for k, r, gap in rows]
        lines.append(f"limit: {limit!r}")
        _emit("\n".join(lines) + "\n", args.output)
    return 0


# ---- generate ------------------------------------------------------------------

def cmd_generate(args: argparse.Namespace) -> int:
    fmt = _check_format(args.fmt, allowed=("edge-list", "dot"))
    spec = _ensemble_spec(args)
    graph = generate_one(spec, 0)
    _emit(serialize(graph, fmt), args.output)
    return 0


_HANDLERS = {
    "select": cmd_select,
    "verify": cmd_verify,
    "eval": cmd_eval,
    "bound": cmd_bound,
    "generate": cmd_generate,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _HANDLERS[args.command](args)
    except (_InputError, _ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except DagError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
