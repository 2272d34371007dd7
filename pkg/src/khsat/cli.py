"""Command-line front end.

Subcommands: ``sat`` (decide a formula file), ``mc`` (model-check a
formula against a model file), ``translate`` (print the global-modality
translation of a conjunction of atoms), ``oracle`` (bounded brute-force
search), ``fuzz`` (differential run with optional report directory).

Exit codes: 0 SAT/found/clean, 1 UNSAT/not found, 2 input error,
3 internal soundness failure (also used for fuzz disagreements).
Identical inputs and flags produce byte-identical ``--json`` output.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .errors import BudgetExceededError, ContractError, InternalSoundnessError
from .lts import LtsModel, ModelFormatError, check_kh, model_check
from .oracle import OracleBounds, fuzz, oracle_sat
from .solver import decide, verdict_to_dict
from .syntax import (AtomConjunction, Formula, Kh, Not, ParseError, desugar,
                     parse, to_text)
from .translate import closure_complement, theta_d, theta_minus, theta_plus

EXIT_SAT = 0
EXIT_UNSAT = 1
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def _emit(data: dict, as_json: bool, lines) -> None:
    if as_json:
        print(json.dumps(data, sort_keys=True, separators=(",", ": ")))
    else:
        for line in lines:
            print(line)


def _read_formula(path: str) -> Formula:
    with open(path) as fh:
        return parse(fh.read())


def _read_model(path: str) -> LtsModel:
    with open(path) as fh:
        return LtsModel.from_json(fh.read())


def _cmd_sat(args) -> int:
    formula = _read_formula(args.formula_file)
    verdict = decide(formula)
    data = verdict_to_dict(verdict)
    if verdict.verdict == "SAT":
        lines = ["SAT",
                 "model: " + verdict.model.to_json(),
                 "witnesses: " + json.dumps(data["witnesses"], sort_keys=True),
                 "branch positives: " + "; ".join(data["branch"]["positives"]),
                 "branch negatives: " + "; ".join(data["branch"]["negatives"]),
                 "disjunct D: " + json.dumps(data["disjunct"]["d"])]
        if args.model_out:
            with open(args.model_out, "w") as fh:
                fh.write(verdict.model.to_json() + "\n")
        if args.dot:
            with open(args.dot, "w") as fh:
                fh.write(verdict.model.to_dot())
        _emit(data, args.json, lines)
        return EXIT_SAT
    _emit(data, args.json, ["UNSAT",
                            f"branches explored: {verdict.branches_explored}",
                            f"disjuncts explored: {verdict.disjuncts_explored}"])
    return EXIT_UNSAT


def _cmd_mc(args) -> int:
    model = _read_model(args.model_file)
    formula = parse(args.formula)
    truth = model_check(model, formula, max_len=args.depth_limit)
    data = {
        "truth_set": sorted(truth, key=model.states.index),
        "holds_everywhere": truth == frozenset(model.states),
    }
    lines = ["truth set: {" + ", ".join(data["truth_set"]) + "}"]
    core = desugar(formula)
    if isinstance(core, Kh):
        witness = check_kh(model, model_check(model, core.pre),
                           model_check(model, core.post),
                           max_len=args.depth_limit)
        data["witness"] = list(witness.actions) if witness is not None else None
        lines.append("witness: " + (str(witness) if witness is not None
                                    else "none"))
    if args.dot:
        with open(args.dot, "w") as fh:
            fh.write(model.to_dot())
    _emit(data, args.json, lines)
    return EXIT_SAT


def _split_atoms(f: Formula) -> AtomConjunction:
    """Interpret a formula as a conjunction of Kh literals."""
    positives = []
    negatives = []

    def walk(g: Formula):
        from .syntax import And
        if isinstance(g, And):
            walk(g.left)
            walk(g.right)
        elif isinstance(g, Kh):
            positives.append((g.pre, g.post))
        elif isinstance(g, Not) and isinstance(g.child, Kh):
            negatives.append((g.child.pre, g.child.post))
        else:
            raise ContractError(
                f"translate expects a conjunction of Kh literals, got: {to_text(g)}")

    walk(desugar(f))
    return AtomConjunction(tuple(positives), tuple(negatives))


def _parse_pairs(text: str) -> list[tuple[int, int]]:
    pairs = []
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        try:
            s, t = part.split(",")
            pairs.append((int(s), int(t)))
        except ValueError:
            raise ContractError(f"bad pair {part!r}; expected 't,s;t,s;...'")
    return pairs


def _cmd_translate(args) -> int:
    formula = _read_formula(args.formula_file)
    conjunction = _split_atoms(formula)
    plus = theta_plus(conjunction.positives)
    minus = theta_minus(conjunction.negatives)
    data = {"theta_plus": to_text(plus), "theta_minus": to_text(minus)}
    lines = [f"theta+: {to_text(plus)}", f"theta-: {to_text(minus)}"]
    if args.d is not None:
        d = closure_complement(conjunction.n_pos, _parse_pairs(args.d))
        constraints = theta_d(conjunction, d)
        rendered = [" | ".join(str(a) for a in options)
                    for options in constraints]
        data["d"] = sorted(list(p) for p in d.pairs)
        data["complement_closure"] = sorted(list(p) for p in d.complement_closure)
        data["theta_d"] = rendered
        lines.append("D: " + json.dumps(data["d"]))
        lines.append("closure of complement: "
                     + json.dumps(data["complement_closure"]))
        lines += ["theta_D: " + r for r in rendered]
    _emit(data, args.json, lines)
    return EXIT_SAT


def _cmd_oracle(args) -> int:
    formula = _read_formula(args.formula_file)
    bounds = OracleBounds(args.max_states, args.max_actions,
                          tuple(args.props.split(",")) if args.props else ())
    model = oracle_sat(formula, bounds)
    if model is None:
        _emit({"found": False}, args.json, ["no model within bounds"])
        return EXIT_UNSAT
    _emit({"found": True, "model": model.to_dict()}, args.json,
          ["found model:", model.to_json()])
    return EXIT_SAT


def _cmd_fuzz(args) -> int:
    bounds = OracleBounds(args.max_states, args.max_actions,
                          tuple(args.props.split(",")) if args.props else ())
    report = fuzz(args.seed, args.trials, bounds, shape=args.shape)
    summary = report.summary()
    if args.report_dir:
        from .report import write_report
        paths = write_report(report, args.report_dir)
        summary["report_files"] = sorted(paths.values())
    _emit(summary, args.json,
          [f"{k}: {v}" for k, v in sorted(summary.items())]
          + [json.dumps({"seed": report.seed, **r.to_row()}, sort_keys=True)
             for r in report.disagreements])
    return EXIT_SAT if not report.disagreements else EXIT_INTERNAL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="khsat",
        description="Satisfiability and model checking for the knowing-how "
                    "modality over labelled transition systems.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sat", help="decide satisfiability of a formula file")
    p.add_argument("formula_file")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--model-out", metavar="FILE", help="write the model JSON")
    p.add_argument("--dot", metavar="FILE", help="write the model as Graphviz")
    p.set_defaults(func=_cmd_sat)

    p = sub.add_parser("mc", help="model-check FORMULA against a model file")
    p.add_argument("model_file")
    p.add_argument("formula")
    p.add_argument("--json", action="store_true")
    p.add_argument("--dot", metavar="FILE", help="write the model as Graphviz")
    p.add_argument("--depth-limit", type=int, default=None,
                   help="bound witness search length (no completeness claim)")
    p.set_defaults(func=_cmd_mc)

    p = sub.add_parser("translate",
                       help="print the global-modality translation of a "
                            "conjunction of Kh literals")
    p.add_argument("formula_file")
    p.add_argument("--d", metavar="PAIRS",
                   help="pair set over positive indices, e.g. '1,1;2,1'")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_translate)

    p = sub.add_parser("oracle", help="bounded brute-force model search")
    p.add_argument("formula_file")
    p.add_argument("--max-states", type=int, default=3)
    p.add_argument("--max-actions", type=int, default=2)
    p.add_argument("--props", default="p,q,r",
                   help="comma-separated proposition alphabet")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("fuzz", help="differential fuzzing: decide vs oracle")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--shape", default="any",
                   choices=("any", "positive", "negative", "mixed"))
    p.add_argument("--max-states", type=int, default=3)
    p.add_argument("--max-actions", type=int, default=2)
    p.add_argument("--props", default="p,q,r")
    p.add_argument("--report-dir", metavar="DIR",
                   help="write trials.csv, disagreements.jsonl and figures")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_fuzz)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, ModelFormatError, ContractError, BudgetExceededError,
            OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InternalSoundnessError as exc:
        print(f"internal soundness error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
