"""
Command-line interface.

    python -m src validate FILE
    python -m src compose FILE1 FILE2 -o OUT
    python -m src zonegraph FILE [--k INT] [--dot PATH]
    python -m src quiescence FILE
    python -m src check IMPL SPEC [--relation ltioco|tioco-delta] [--depth INT]
    python -m src oracle IMPL SPEC [--relation ltioco|tioco-delta|tioco-Delta] [--length INT]
    python -m src spantraces FILE [--depth INT] [--quiescence] [--refined]

Every command accepts --json and --log-level. Reports go to stdout, diagnostics
to stderr. Exit codes: 0 ok / pass, 1 conformance failure, 2 invalid input.
"""
import argparse
import json
import logging
import os
import sys
from typing import List, Optional

from src import __version__, oracle
from src.conformance import CheckConfig, ConformanceRelation, check, explain
from src.errors import LtiocoError
from src.logger import setup_logging
from src.model import compose, composable, validate
from src.settings import DEFAULT_CHECK_DEPTH, DEFAULT_ORACLE_LENGTH, DEFAULT_SPANTRACE_DEPTH
from src.ta_format import load_model, render
from src.traces import SpanTrace, enumerate_span_traces
from src.zonegraph import build_iolzg, classify_quiescence, export_dot

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INVALID = 2


def _emit(args, payload: dict, text: str):
    if args.json:
        report = {"command": args.command, "inputs": args.inputs, **payload, "version": __version__}
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(text)


def _write_atomic(path: str, content: str):
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        f.write(content)
    os.replace(tmp, path)


# --------------------------------------- Commands ---------------------------------------

def cmd_validate(args) -> int:
    a = load_model(args.file)
    report = validate(a, escalate_tau_cycles=args.strict_tau)
    lines = [
        f"Model {a.name}: {len(a.locations)} locations, {len(a.clocks)} clocks, {len(a.switches)} switches",
        f"  diagonal free:              {report.diagonal_free}",
        f"  invariants downward closed: {report.invariants_downward_closed}",
        f"  tau cycle free:             {report.tau_cycle_free}",
        f"  max constant:               {report.max_constant}",
    ]
    lines += [f"  {p.render()}" for p in report.problems]
    lines.append("OK" if report.ok else "INVALID")
    _emit(args, {"validation": report.as_dict()}, "\n".join(lines))
    return EXIT_OK if report.ok else EXIT_INVALID


def cmd_compose(args) -> int:
    a1, a2 = load_model(args.first), load_model(args.second)
    ok, reason = composable(a1, a2)
    if not ok:
        logger.error(f"{a1.name} and {a2.name} are not composable: {reason}")
        return EXIT_INVALID
    composed = compose(a1, a2)
    _write_atomic(args.output, render(composed))
    logger.info(f"Wrote {composed.name} to {args.output} ({reason})")
    payload = {
        "composed": {
            "name": composed.name,
            "output": args.output,
            "locations": len(composed.locations),
            "switches": len(composed.switches),
            "reason": reason,
        }
    }
    _emit(args, payload, f"{composed.name}: {len(composed.locations)} locations, "
                         f"{len(composed.switches)} switches -> {args.output}")
    return EXIT_OK


def cmd_zonegraph(args) -> int:
    a = load_model(args.file)
    g = build_iolzg(a, args.k)
    if args.dot:
        _write_atomic(args.dot, export_dot(g))
        logger.info(f"Wrote DOT graph to {args.dot}")
    states = g.sorted_states()
    lines = [f"IOLZG of {a.name} (k={g.ceiling}): {len(states)} states, {g.graph.number_of_edges()} edges"]
    for state in states:
        marker = "*" if state == g.initial else " "
        lines.append(f" {marker} {state.render()}")
    payload = {
        "graph": {
            "ceiling": g.ceiling,
            "initial": g.initial.render(),
            "states": [s.render() for s in states],
            "edges": g.graph.number_of_edges(),
        }
    }
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_quiescence(args) -> int:
    a = load_model(args.file)
    g = build_iolzg(a)
    rows = []
    for state in g.sorted_states():
        cls = classify_quiescence(state, g)
        rows.append({"state": state.render(), "delta_S": cls.safe, "delta_E": cls.enforced})
    width = max((len(r["state"]) for r in rows), default=5)
    lines = [f"{'state'.ljust(width)}  delta_S  delta_E"]
    for r in rows:
        lines.append(f"{r['state'].ljust(width)}  {'yes' if r['delta_S'] else 'no':<7}  "
                     f"{'yes' if r['delta_E'] else 'no'}")
    _emit(args, {"quiescence": rows}, "\n".join(lines))
    return EXIT_OK


def cmd_check(args) -> int:
    impl = build_iolzg(load_model(args.impl))
    spec = build_iolzg(load_model(args.spec))
    cfg = CheckConfig(depth=args.depth, relation=ConformanceRelation(args.relation))
    verdict = check(impl, spec, cfg)
    _emit(args, {"verdict": verdict.as_dict()}, explain(verdict))
    return EXIT_OK if verdict.passed else EXIT_FAIL


def cmd_oracle(args) -> int:
    cfg = oracle.OracleConfig(
        trace_length=args.length,
        max_delay=args.max_delay,
        closed_only=not args.allow_strict,
    )
    impl = oracle.build_tiolts(load_model(args.impl), cfg)
    spec = oracle.build_tiolts(load_model(args.spec), cfg)
    verdict = oracle.check_conformance(impl, spec, cfg.trace_length, oracle.OracleRelation(args.relation))
    _emit(args, {"verdict": verdict.as_dict()}, oracle.explain(verdict))
    return EXIT_OK if verdict.passed else EXIT_FAIL


def cmd_spantraces(args) -> int:
    g = build_iolzg(load_model(args.file))
    traces = sorted(enumerate_span_traces(g, args.depth, with_quiescence=args.quiescence, refined=args.refined),
                    key=SpanTrace.sort_key)
    rendered = [t.render() for t in traces]
    _emit(args, {"spantraces": rendered}, "\n".join(rendered))
    return EXIT_OK


# ---------------------------------------- Parser ----------------------------------------

def _positive(value: str) -> int:
    n = int(value)
    if n < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return n


def _non_negative(value: str) -> int:
    n = int(value)
    if n < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {value}")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print a JSON report instead of text")
    common.add_argument("--log-level", default=None, help="override LOG_LEVEL (DEBUG, INFO, WARNING, ...)")

    parser = argparse.ArgumentParser(prog="ltioco", description="Live timed input/output conformance toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check the structural assumptions of a model")
    p.add_argument("file")
    p.add_argument("--strict-tau", action="store_true", help="treat tau cycles as errors")
    p.set_defaults(func=cmd_validate, inputs=lambda a: [a.file])

    p = sub.add_parser("compose", parents=[common], help="parallel composition of two models")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_compose, inputs=lambda a: [a.first, a.second])

    p = sub.add_parser("zonegraph", parents=[common], help="build the zone graph of a model")
    p.add_argument("file")
    p.add_argument("--k", type=_non_negative, default=None, help="clock ceiling (default: max constant)")
    p.add_argument("--dot", default=None, help="write the graph in DOT format to this path")
    p.set_defaults(func=cmd_zonegraph, inputs=lambda a: [a.file])

    p = sub.add_parser("quiescence", parents=[common], help="safe/enforced quiescence of every symbolic state")
    p.add_argument("file")
    p.set_defaults(func=cmd_quiescence, inputs=lambda a: [a.file])

    p = sub.add_parser("check", parents=[common], help="symbolic conformance check")
    p.add_argument("impl")
    p.add_argument("spec")
    p.add_argument("--relation", choices=[r.value for r in ConformanceRelation], default=ConformanceRelation.LTIOCO.value)
    p.add_argument("--depth", type=_positive, default=DEFAULT_CHECK_DEPTH)
    p.set_defaults(func=cmd_check, inputs=lambda a: [a.impl, a.spec])

    p = sub.add_parser("oracle", parents=[common], help="discrete-time brute-force conformance check")
    p.add_argument("impl")
    p.add_argument("spec")
    p.add_argument("--relation", choices=[r.value for r in oracle.OracleRelation],
                   default=oracle.OracleRelation.LTIOCO.value)
    p.add_argument("--length", type=_non_negative, default=DEFAULT_ORACLE_LENGTH)
    p.add_argument("--max-delay", type=_positive, default=None, help="largest delay between two steps")
    p.add_argument("--allow-strict", action="store_true", help="accept strict constraints (integer delays only)")
    p.set_defaults(func=cmd_oracle, inputs=lambda a: [a.impl, a.spec])

    p = sub.add_parser("spantraces", parents=[common], help="enumerate span traces of a model")
    p.add_argument("file")
    p.add_argument("--depth", type=_non_negative, default=DEFAULT_SPANTRACE_DEPTH)
    p.add_argument("--quiescence", action="store_true", help="include quiescence steps")
    p.add_argument("--refined", action="store_true", help="cut spans until each reaches one set of states")
    p.set_defaults(func=cmd_spantraces, inputs=lambda a: [a.file])

    return parser


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_INVALID
    setup_logging(args.log_level)
    args.inputs = args.inputs(args)
    try:
        return args.func(args)
    except (LtiocoError, OSError) as e:
        logger.error(str(e))
        return EXIT_INVALID


def main():
    sys.exit(run())
