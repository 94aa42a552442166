"""Command line front end: run, validate, or oracle-check scenario files.

Exit codes: 0 on success, 1 for scenario (file or document) errors, 2 for a
step that failed at run time.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .oracle import ORACLE_MAX_QUBITS
from .runner import RunError, run
from .scenario import Options, Scenario, ScenarioError, parse_scenario

EXIT_OK = 0
EXIT_SCENARIO_ERROR = 1
EXIT_STEP_ERROR = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmeasure",
        description="Simulate unitary measurement scenarios and report branches, "
        "correlation ledgers and observer agreement.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("file", help="scenario JSON file")
        p.add_argument(
            "--tol", type=float, default=None,
            help="detection tolerance (overrides the scenario's option; default 1e-9)",
        )
        p.add_argument(
            "--relabel", choices=("on", "off"), default=None,
            help="count anticorrelated clusters in the ledger (default on)",
        )
        p.add_argument(
            "--format", choices=("text", "json"), default="text", help="report format"
        )
        p.add_argument("--out", default=None, help="write the report here instead of stdout")

    add_common(sub.add_parser("run", help="execute a scenario and print its report"))
    sub.add_parser("validate", help="parse and validate a scenario without running it") \
        .add_argument("file", help="scenario JSON file")
    add_common(
        sub.add_parser(
            "oracle",
            help=f"execute through the dense-matrix oracle (max {ORACLE_MAX_QUBITS} qubits)",
        )
    )
    return parser


def _load(path: str) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError("bad-structure", f"cannot read {path!r}: {exc.strerror}") from None
    return parse_scenario(text)


def _apply_overrides(scenario: Scenario, args: argparse.Namespace) -> Scenario:
    options: Options = scenario.options
    if args.tol is not None:
        if not 0 < args.tol < 1:
            raise ScenarioError("bad-structure", f"--tol must be in (0, 1), got {args.tol}")
        options = replace(options, tolerance=args.tol)
    if args.relabel is not None:
        options = replace(options, relabel=args.relabel == "on")
    return replace(scenario, options=options)


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        scenario = _load(args.file)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO_ERROR

    if args.command == "validate":
        print(f"scenario valid: {len(scenario.register)} subsystems, {len(scenario.script)} steps")
        return EXIT_OK

    try:
        scenario = _apply_overrides(scenario, args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCENARIO_ERROR

    engine = "oracle" if args.command == "oracle" else "gates"
    try:
        report = run(scenario, engine=engine)
    except RunError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_STEP_ERROR

    _emit(report.render_text() if args.format == "text" else report.render_json(), args.out)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
