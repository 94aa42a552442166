"""Measurement procedures assembled from the local gates.

Three levels of idealization:

- :func:`uncorrected_measure` imprints the signal on a single environment
  qubit and swaps the observer in.  The environment's initial branch decides
  whether the signal-observer pair comes out correlated or anticorrelated.
- :func:`corrected_measure` runs the four-gate procedure against a
  correlated (GHZ-form) environment: dump the observer's arbitrary state
  into the last environment slot, undo the environment's imprint on the
  first slot using the redundant copy, imprint the signal, and swap the
  observer in.  The result is perfect signal-observer correlation, at the
  price of one unit of the environment's correlation resource.
- :func:`ideal_measure` suppresses the environment entirely and assumes a
  pre-corrected observer sitting in the ready state of the chosen basis.

The two scenario builders chain ideal measurements in mismatched bases to
reproduce the loss of observer agreement, with optional redundant records
that keep the first observer's outcome recoverable.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import analysis
from .gates import GateOp, Imprint, InverseImprint, RotateBasis, Swap, apply_script
from .statevec import PureState, product_state

#: Largest admissible deviation of the observer from the ready state
#: (2-norm of the off-ready component) before an ideal measurement.
READY_TOL = 1e-9


class ObserverNotReadyError(ValueError):
    """Observer is not in the ready state of the chosen basis.

    Raised by :func:`ideal_measure`; it means the correction step that
    would have prepared the observer was skipped.
    """


class EnvironmentNotGHZError(ValueError):
    """Environment subsystems are not jointly in GHZ form.

    The corrected procedure presumes the correlated resource state
    Σ_k χ_k |k…k⟩ over exactly the listed environment labels, unentangled
    with everything else.
    """


@dataclass(frozen=True)
class MeasurementOutcomeSpec:
    """Operands of a corrected measurement: who measures whom against what.

    ``basis`` selects the basis in which the imprint correlates signal and
    observer; the swaps are basis independent.
    """

    signal: str
    observer: str
    environment: tuple[str, ...]
    basis: str = "Z"

    def __post_init__(self) -> None:
        object.__setattr__(self, "environment", tuple(self.environment))
        labels = (self.signal, self.observer, *self.environment)
        if len(set(labels)) != len(labels):
            raise ValueError(f"measurement operands must be distinct, got {labels}")
        if not self.environment:
            raise ValueError("environment label list must not be empty")
        if self.basis not in ("Z", "X"):
            raise ValueError(f"basis must be 'Z' or 'X', got {self.basis!r}")


def uncorrected_script(signal: str, observer: str, environment: str) -> list[GateOp]:
    return [Imprint(signal, environment), Swap(observer, environment)]


def corrected_script(spec: MeasurementOutcomeSpec) -> list[GateOp]:
    """Gate sequence of the environment-corrected measurement.

    The final swap exchanges the observer with the first environment slot;
    that is the operand choice that leaves the observer holding the signal's
    value and the first slot rejoining the environment's correlated branch.
    """
    env = spec.environment
    e1, e2, e_last = env[0], env[1], env[-1]
    return [
        Swap(spec.observer, e_last),
        InverseImprint(e2, e1),
        Imprint(spec.signal, e1),
        Swap(spec.observer, e1),
    ]


def ideal_script(signal: str, observer: str, basis: str) -> list[GateOp]:
    if basis == "Z":
        return [Imprint(signal, observer)]
    if basis == "X":
        return [
            RotateBasis(signal),
            RotateBasis(observer),
            Imprint(signal, observer),
            RotateBasis(signal),
            RotateBasis(observer),
        ]
    raise ValueError(f"basis must be 'Z' or 'X', got {basis!r}")


def uncorrected_measure(
    state: PureState, signal: str, observer: str, environment: str
) -> PureState:
    """Measure without environmental correction: imprint on e, swap o in.

    On |ψ⟩_s |φ⟩_o (χ_↑|↑⟩ + χ_↓|↓⟩)_e this yields
    (χ_↑|Ψ⟩ + χ_↓|Ψ̄⟩)_so |φ⟩_e, i.e. a correlated branch and an
    anticorrelated branch weighted by the environment's amplitudes.
    """
    if len({signal, observer, environment}) != 3:
        raise ValueError("signal, observer and environment must be distinct")
    return apply_script(state, uncorrected_script(signal, observer, environment))


def check_environment(
    state: PureState, spec: MeasurementOutcomeSpec, tol: float = analysis.DEFAULT_TOL
) -> tuple[complex, complex]:
    """Verify the environment is jointly in strict GHZ form; return its coefficients.

    Detection runs through :func:`analysis.find_clusters` without relabeling.
    Accepted shapes over exactly the environment labels: one covering
    cluster, or all members constant at the same bit (the single-branch
    degenerate case).  Anything entangled with outside subsystems, or merely
    piecewise correlated, is rejected.
    """
    env = spec.environment
    decomposition = analysis.find_clusters(state, tol, allow_relabeling=False)
    env_set = set(env)
    owned: list[analysis.CorrelationCluster] = []
    for cluster in decomposition.clusters:
        members = set(cluster.members)
        if members & env_set:
            if not members <= env_set:
                raise EnvironmentNotGHZError(
                    f"environment labels {sorted(members & env_set)} are entangled "
                    f"with outside subsystems {sorted(members - env_set)}"
                )
            owned.append(cluster)
    in_residual = env_set & set(decomposition.residual)
    if in_residual:
        raise EnvironmentNotGHZError(
            f"environment subsystems {sorted(in_residual)} carry no GHZ structure"
        )

    if len(owned) == 1 and set(owned[0].members) == env_set:
        return owned[0].coefficients
    # Degenerate resource: every environment qubit constant at the same bit.
    bits = []
    for cluster in owned:
        if cluster.size != 1:
            raise EnvironmentNotGHZError(
                "environment splits into several correlated pieces instead of one"
            )
        c_up, c_down = cluster.coefficients
        if abs(c_up) > tol and abs(c_down) > tol:
            raise EnvironmentNotGHZError(
                f"environment qubit {cluster.members[0]!r} is in a local superposition, "
                "not part of a joint GHZ branch"
            )
        bits.append(0 if abs(c_up) > abs(c_down) else 1)
    if len(set(bits)) != 1:
        raise EnvironmentNotGHZError(
            "environment qubits sit in different constant branches"
        )
    return (1.0 + 0.0j, 0.0j) if bits[0] == 0 else (0.0j, 1.0 + 0.0j)


def corrected_measure(
    state: PureState,
    spec: MeasurementOutcomeSpec,
    tol: float = analysis.DEFAULT_TOL,
) -> PureState:
    """Environment-corrected measurement against a GHZ-form environment.

    On (Σ_i ψ_i|i⟩)_s |φ⟩_o (Σ_k χ_k|k…k⟩)_e1..eN the output factorizes as
    (Σ_i ψ_i|ii⟩)_so ⊗ (Σ_k χ_k|k⟩^⊗(N−1))_e1..e(N−1) ⊗ |φ⟩_eN.

    Needs N ≥ 2: the correction draws on a redundant copy (e2) and a dump
    slot (eN).  For N = 2 those coincide; the same script still runs, but
    the clean factorization above is no longer the generic outcome.
    """
    if len(spec.environment) < 2:
        raise ValueError(
            "corrected measurement needs at least two environment subsystems "
            "(a redundant copy and a dump slot)"
        )
    work = state
    if spec.basis == "X":
        rotations: list[GateOp] = [
            RotateBasis(lbl) for lbl in (spec.signal, spec.observer, *spec.environment)
        ]
        work = apply_script(work, rotations)
        check_environment(work, spec, tol)
        work = apply_script(work, corrected_script(spec))
        return apply_script(work, rotations)
    check_environment(work, spec, tol)
    return apply_script(work, corrected_script(spec))


def check_ready(state: PureState, observer: str, basis: str) -> None:
    """Raise unless the observer sits in the basis-0 ready state (|↑⟩ or |→⟩)."""
    pos = state.register.position(observer)
    n = state.n_qubits
    psi = state.amplitudes.reshape([2] * n)
    v_up = np.moveaxis(psi, pos, 0)[0].reshape(-1)
    v_down = np.moveaxis(psi, pos, 0)[1].reshape(-1)
    if basis == "Z":
        off = float(np.linalg.norm(v_down))
        ready = "↑"
    elif basis == "X":
        off = float(np.linalg.norm(v_up - v_down)) / np.sqrt(2.0)
        ready = "→"
    else:
        raise ValueError(f"basis must be 'Z' or 'X', got {basis!r}")
    if off > READY_TOL:
        raise ObserverNotReadyError(
            f"observer {observer!r} deviates from the ready state |{ready}⟩ by "
            f"{off:.3e}; run the corrected procedure first"
        )


def ideal_measure(state: PureState, signal: str, observer: str, basis: str) -> PureState:
    """Environment-suppressed measurement by a pre-corrected observer.

    In Z this is a plain imprint; in X the imprint is conjugated into the
    →/← basis.  The observer must already be in the ready state of the
    chosen basis (tolerance ``READY_TOL``), which is what the corrected
    procedure leaves behind.
    """
    if signal == observer:
        raise ValueError("signal and observer must be distinct")
    check_ready(state, observer, basis)
    return apply_script(state, ideal_script(signal, observer, basis))


def _scenario_register(record_count: int) -> tuple[str, ...]:
    records = tuple(f"^{j}o1" for j in range(1, record_count + 1))
    return ("s", "o2", "o1", *records, "o3'")


def run_scenario_different_basis(psi: tuple[complex, complex]) -> PureState:
    """Chain of mismatched-basis measurements that breaks observer agreement.

    o1 measures s in Z, o2 measures s in X, o3' measures o1 in X.  Register
    order is (s, o2, o1, o3'), so the four X-basis branches read →→→→,
    →→←←, ←←→→, ←←←← with amplitudes (ψ_↑ ± ψ_↓)/2; the mixed patterns are
    the branches on which o2 and o3' disagree about the signal.
    """
    labels = _scenario_register(0)
    half = (1.0, 1.0)
    state = product_state(labels, [psi, half, (1.0, 0.0), half])
    state = ideal_measure(state, "s", "o1", "Z")
    state = ideal_measure(state, "s", "o2", "X")
    state = ideal_measure(state, "o1", "o3'", "X")
    return state


def run_scenario_appendix(psi: tuple[complex, complex], record_count: int) -> PureState:
    """Mismatched-basis chain with redundant Z-records of the first observer.

    Before the X measurements run, o1 is Z-measured by ``record_count``
    record subsystems ^1o1 … ^m o1.  Register order is
    (s, o2, o1, ^1o1, …, ^m o1, o3').  The records stay untouched by the
    later rotations, so every branch of the final state still carries o1's
    original outcome redundantly.
    """
    if record_count < 1:
        raise ValueError("need at least one record subsystem")
    labels = _scenario_register(record_count)
    half = (1.0, 1.0)
    ready = (1.0, 0.0)
    pairs = [psi, half, ready] + [ready] * record_count + [half]
    state = product_state(labels, pairs)
    state = ideal_measure(state, "s", "o1", "Z")
    for j in range(1, record_count + 1):
        state = ideal_measure(state, "o1", f"^{j}o1", "Z")
    state = ideal_measure(state, "s", "o2", "X")
    state = ideal_measure(state, "o1", "o3'", "X")
    return state
