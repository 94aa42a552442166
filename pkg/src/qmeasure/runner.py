"""Scenario execution and deterministic report rendering.

Reports are lists of (title, rows) sections.  Rendering rules are fixed so
that the same scenario and package version always produce byte-identical
output: numbers print with 12 significant digits, "-0" collapses to "0",
values below the branch pruning threshold print as "0", and branch tables
come pre-sorted from the decomposition.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from . import analysis, protocol
from .gates import GateOp, RotateBasis, apply_gate
from .oracle import oracle_apply
from .scenario import (
    AgreementStep,
    BranchesStep,
    CorrectedStep,
    GhzDecl,
    IdealStep,
    LedgerStep,
    RecoverStep,
    Scenario,
    SingleDecl,
    Step,
    UncorrectedStep,
)
from .statevec import (
    BranchSet,
    PRUNE_TOL,
    PureState,
    branch_decompose,
    make_ghz,
    product_state,
    tensor,
)


class RunError(Exception):
    """A script step failed at run time; carries the 1-based step number."""

    def __init__(self, step_number: int, step: Step, cause: Exception):
        self.step_number = step_number
        self.cause = cause
        super().__init__(f"step {step_number} ({type(step).__name__}): {cause}")


@dataclass(frozen=True)
class Section:
    title: str
    rows: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class Report:
    """Ordered report sections with text and JSON renderings."""

    sections: tuple[Section, ...]

    def render_text(self) -> str:
        blocks = []
        for section in self.sections:
            lines = [f"== {section.title} =="]
            if section.rows:
                widths = [
                    max(len(row[c]) for row in section.rows if c < len(row))
                    for c in range(max(len(row) for row in section.rows))
                ]
                for row in section.rows:
                    padded = [
                        cell.ljust(widths[c]) if c < len(row) - 1 else cell
                        for c, cell in enumerate(row)
                    ]
                    lines.append("  ".join(padded).rstrip())
            blocks.append("\n".join(lines))
        return "\n\n".join(blocks) + "\n"

    def render_json(self) -> str:
        doc = {
            "sections": [
                {"title": s.title, "rows": [list(row) for row in s.rows]}
                for s in self.sections
            ]
        }
        return json.dumps(doc, indent=2, ensure_ascii=False, sort_keys=True) + "\n"


def fmt(value: float) -> str:
    """12-significant-digit number formatting with -0 and noise collapsed to 0."""
    if abs(value) < PRUNE_TOL:
        return "0"
    text = f"{value:.12g}"
    return "0" if text in ("-0", "-0.0") else text


def _initial_state(scenario: Scenario) -> PureState:
    state: PureState | None = None
    for decl in scenario.declarations:
        if isinstance(decl, SingleDecl):
            part = product_state((decl.label,), [decl.amplitudes])
        elif isinstance(decl, GhzDecl):
            part = make_ghz(decl.labels, decl.coefficients)
        else:
            raise TypeError(f"unknown declaration {decl!r}")
        state = part if state is None else tensor(state, part)
    assert state is not None
    return state


def _basis_for(step_basis: dict[str, str], state: PureState) -> dict[str, str]:
    return {lbl: step_basis.get(lbl, "Z") for lbl in state.register.labels}


def _branch_section(title: str, branches: BranchSet) -> Section:
    rows = [("outcome", "re", "im", "probability")]
    for branch in branches.branches:
        rows.append(
            (
                branch.outcome,
                fmt(branch.amplitude.real),
                fmt(branch.amplitude.imag),
                fmt(branch.probability),
            )
        )
    return Section(title, tuple(rows))


def _ledger_section(title: str, entry: analysis.LedgerEntry) -> Section:
    rows = [("cluster", "measure")]
    for cluster in entry.decomposition.clusters:
        shown = [
            member + ("~" if flip else "")
            for member, flip in zip(cluster.members, cluster.flips)
        ]
        rows.append((" ".join(shown), str(analysis.cluster_measure(cluster))))
    rows.append(("total", str(entry.total)))
    return Section(title, tuple(rows))


def _agreement_section(title: str, report: analysis.AgreementReport) -> Section:
    header = ("outcome", "probability") + tuple(f"{a}={b}" for a, b in report.pairs)
    rows = [header]
    for row in report.rows:
        rows.append(
            (row.outcome, fmt(row.probability))
            + tuple("yes" if ok else "no" for ok in row.agrees)
        )
    rows.append(("aggregate", "") + tuple(fmt(w) for w in report.aggregates))
    return Section(title, tuple(rows))


def _recover_section(title: str, branches: BranchSet, inferred: list[str]) -> Section:
    rows = [("outcome", "probability", "record")]
    for branch, symbol in zip(branches.branches, inferred):
        rows.append((branch.outcome, fmt(branch.probability), symbol))
    return Section(title, tuple(rows))


def run(scenario: Scenario, engine: str = "gates") -> Report:
    """Execute a scenario; every analysis step appends a report section.

    ``engine`` selects how gate scripts are executed: "gates" uses the
    strided kernels, "oracle" routes every unitary through the dense-matrix
    path (same validation, same report shape) for cross-checking.
    """
    if engine not in ("gates", "oracle"):
        raise ValueError(f"engine must be 'gates' or 'oracle', got {engine!r}")
    state = _initial_state(scenario)
    tol = scenario.options.tolerance

    def execute(current: PureState, script: list[GateOp]) -> PureState:
        if engine == "oracle":
            return oracle_apply(current, script)
        out = current
        for op in script:
            out = apply_gate(out, op)
        return out

    sections = [
        Section(
            "initial state",
            (
                ("subsystems", " ".join(state.register.labels)),
                ("qubits", str(state.n_qubits)),
                ("norm", fmt(state.norm())),
            ),
        )
    ]
    ledger = analysis.CorrelationLedger()

    for i, step in enumerate(scenario.script):
        number = i + 1
        try:
            if isinstance(step, GateOp):
                state = execute(state, [step])
            elif isinstance(step, UncorrectedStep):
                state = execute(
                    state,
                    protocol.uncorrected_script(step.signal, step.observer, step.environment),
                )
            elif isinstance(step, CorrectedStep):
                if engine == "oracle":
                    spec = step.spec
                    rotations: list[GateOp] = (
                        [RotateBasis(lbl) for lbl in (spec.signal, spec.observer, *spec.environment)]
                        if spec.basis == "X"
                        else []
                    )
                    state = execute(state, rotations)
                    protocol.check_environment(state, spec, tol)
                    state = execute(state, protocol.corrected_script(spec))
                    state = execute(state, rotations)
                else:
                    state = protocol.corrected_measure(state, step.spec, tol)
            elif isinstance(step, IdealStep):
                protocol.check_ready(state, step.observer, step.basis)
                state = execute(state, protocol.ideal_script(step.signal, step.observer, step.basis))
            elif isinstance(step, BranchesStep):
                branches = branch_decompose(state, _basis_for(step.basis, state))
                sections.append(_branch_section(f"step {number}: branches", branches))
            elif isinstance(step, LedgerStep):
                ledger = analysis.ledger_record(
                    ledger, state, step.tag, tol, scenario.options.relabel
                )
                sections.append(
                    _ledger_section(f"step {number}: ledger '{step.tag}'", ledger.entries[-1])
                )
            elif isinstance(step, AgreementStep):
                branches = branch_decompose(state, _basis_for(step.basis, state))
                report = analysis.agreement(branches, step.pairs)
                sections.append(_agreement_section(f"step {number}: agreement", report))
            elif isinstance(step, RecoverStep):
                branches = branch_decompose(state, _basis_for(step.basis, state))
                inferred = analysis.recover_record(branches, step.records)
                sections.append(
                    _recover_section(f"step {number}: record recovery", branches, inferred)
                )
            else:
                raise TypeError(f"unknown step {step!r}")
        except RunError:
            raise
        except (ValueError, TypeError) as exc:
            raise RunError(number, step, exc) from exc

    if scenario.script:
        sections.append(Section("final state", (("norm", fmt(state.norm())),)))
    return Report(tuple(sections))
