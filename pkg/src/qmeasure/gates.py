"""Local unitaries applied on labeled subsystems of a pure state.

The named gates are the record-copying imprint (a CNOT whose control fires
on ↓), its inverse, the subsystem swap, and the self-inverse ↑/↓ ↔ →/←
basis rotation.  Kernels work by strided slicing of the amplitude array
(the stride is fixed by the operand's register position), never by building
2^n x 2^n matrices, so a gate costs O(2^n) time and memory.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .statevec import PureState, _INV_SQRT2, _adopt

UNITARY_TOL = 1e-9


@dataclass(frozen=True)
class Imprint:
    """Copy the source's computational value onto the target (CNOT-like)."""

    source: str
    target: str

    def __post_init__(self) -> None:
        if self.source == self.target:
            raise ValueError(f"imprint needs two distinct operands, got {self.source!r} twice")


@dataclass(frozen=True)
class InverseImprint:
    """Undo an imprint the source may have left on the target."""

    source: str
    target: str

    def __post_init__(self) -> None:
        if self.source == self.target:
            raise ValueError(
                f"inverse imprint needs two distinct operands, got {self.source!r} twice"
            )


@dataclass(frozen=True)
class Swap:
    """Exchange the states of two subsystems."""

    a: str
    b: str

    def __post_init__(self) -> None:
        if self.a == self.b:
            raise ValueError(f"swap needs two distinct operands, got {self.a!r} twice")


@dataclass(frozen=True)
class RotateBasis:
    """Rotate one subsystem between the ↑/↓ and →/← bases (self-inverse)."""

    target: str


GateOp = Imprint | InverseImprint | Swap | RotateBasis


def _slice_at(n: int, fixed: dict[int, int]) -> tuple:
    ix: list = [slice(None)] * n
    for pos, val in fixed.items():
        ix[pos] = val
    return tuple(ix)


def _pair_positions(state: PureState, a: str, b: str) -> tuple[int, int, int]:
    reg = state.register
    return reg.position(a), reg.position(b), len(reg)


def imprint(state: PureState, source: str, target: str) -> PureState:
    """Flip the target wherever the source is ↓; identity on the ↑ rows.

    Basis action on (source, target): ↑↑→↑↑, ↑↓→↑↓, ↓↑→↓↓, ↓↓→↓↑.
    """
    if source == target:
        raise ValueError(f"imprint needs two distinct operands, got {source!r} twice")
    ps, pt, n = _pair_positions(state, source, target)
    psi = state.amplitudes.reshape([2] * n)
    out = np.empty_like(psi)
    keep = _slice_at(n, {ps: 0})
    out[keep] = psi[keep]
    lo = _slice_at(n, {ps: 1, pt: 0})
    hi = _slice_at(n, {ps: 1, pt: 1})
    out[lo] = psi[hi]
    out[hi] = psi[lo]
    return _adopt(state.register, out.reshape(-1))


def inverse_imprint(state: PureState, source: str, target: str) -> PureState:
    """Inverse of :func:`imprint`; for qubits the two coincide."""
    return imprint(state, source, target)


def swap(state: PureState, a: str, b: str) -> PureState:
    """Exchange two subsystems: |xy⟩ → |yx⟩ on (a, b)."""
    if a == b:
        raise ValueError(f"swap needs two distinct operands, got {a!r} twice")
    pa, pb, n = _pair_positions(state, a, b)
    psi = state.amplitudes.reshape([2] * n)
    return _adopt(state.register, np.swapaxes(psi, pa, pb).reshape(-1))


def rotate_basis(state: PureState, target: str) -> PureState:
    """Apply the self-inverse map ↑ → (↑+↓)/√2, ↓ → (↑−↓)/√2 on one subsystem.

    Measuring in Z after this rotation is the same as measuring in X before it.
    """
    pt = state.register.position(target)
    n = state.n_qubits
    psi = state.amplitudes.reshape([2] * n)
    lo = _slice_at(n, {pt: 0})
    hi = _slice_at(n, {pt: 1})
    out = np.empty_like(psi)
    out[lo] = (psi[lo] + psi[hi]) * _INV_SQRT2
    out[hi] = (psi[lo] - psi[hi]) * _INV_SQRT2
    return _adopt(state.register, out.reshape(-1))


def apply_single(state: PureState, target: str, u: np.ndarray) -> PureState:
    """Apply a validated 2x2 unitary on one subsystem."""
    mat = np.asarray(u, dtype=np.complex128)
    if mat.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {mat.shape}")
    defect = np.max(np.abs(mat.conj().T @ mat - np.eye(2)))
    if defect > UNITARY_TOL:
        raise ValueError(f"matrix is not unitary (max |u†u - I| = {defect:.3e})")
    pt = state.register.position(target)
    n = state.n_qubits
    psi = state.amplitudes.reshape([2] * n)
    lo = _slice_at(n, {pt: 0})
    hi = _slice_at(n, {pt: 1})
    out = np.empty_like(psi)
    out[lo] = mat[0, 0] * psi[lo] + mat[0, 1] * psi[hi]
    out[hi] = mat[1, 0] * psi[lo] + mat[1, 1] * psi[hi]
    return _adopt(state.register, out.reshape(-1))


def apply_gate(state: PureState, op: GateOp) -> PureState:
    """Apply one named gate."""
    if isinstance(op, Imprint):
        return imprint(state, op.source, op.target)
    if isinstance(op, InverseImprint):
        return inverse_imprint(state, op.source, op.target)
    if isinstance(op, Swap):
        return swap(state, op.a, op.b)
    if isinstance(op, RotateBasis):
        return rotate_basis(state, op.target)
    raise TypeError(f"not a gate operation: {op!r}")


def apply_script(state: PureState, script: Sequence[GateOp]) -> PureState:
    """Apply gates left to right in list order.

    The first invalid gate aborts with its error; since states are values the
    caller's input is never touched.
    """
    out = state
    for op in script:
        out = apply_gate(out, op)
    return out


def invert_script(script: Sequence[GateOp]) -> list[GateOp]:
    """Script that undoes ``script``: reversed order, each gate inverted.

    Swap and the basis rotation are self-inverse; imprint and inverse imprint
    exchange roles (and coincide on qubits).
    """
    inverted: list[GateOp] = []
    for op in reversed(script):
        if isinstance(op, Imprint):
            inverted.append(InverseImprint(op.source, op.target))
        elif isinstance(op, InverseImprint):
            inverted.append(Imprint(op.source, op.target))
        else:
            inverted.append(op)
    return inverted
