"""Correlation-cluster detection and accounting on pure states.

A state is in *cluster normal form* when it factors into groups of
subsystems that are each of the two-branch correlated shape
Σ_k c_k |k…k⟩ (optionally with per-member bit flips when anticorrelated
groups are admitted).  Single subsystems in an arbitrary state count as
degenerate one-member clusters.  Detection works in two stages, as the
branch structure suggests:

1. group subsystems whose computational bits co-vary over every branch of
   the state's support (equal everywhere, or opposite everywhere in
   relabeling mode) into candidate clusters;
2. try to factor each candidate out of the state; candidates that do not
   factor cleanly are moved to the residual.

The integer correlation measure of a cluster is its member count minus one
when both coefficients are live, else zero; ledger snapshots track how that
resource moves through a measurement procedure.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .statevec import BranchSet, PureState, Register

#: Default detection tolerance: 2-norm reconstruction error accepted per
#: factored cluster, and the support cutoff on |amplitude|.
DEFAULT_TOL = 1e-9


class NotClusterNormalError(ValueError):
    """The state has residual subsystems and therefore no ledger value."""


@dataclass(frozen=True)
class CorrelationCluster:
    """A group of subsystems in the correlated shape Σ_k c_k |k…k⟩.

    ``coefficients`` are (c_up, c_down) where c_up weights the branch in
    which the first member is ↑.  ``flips`` marks members that carry the
    opposite bit of the first member (only set in relabeling mode; the first
    member is never flipped).
    """

    members: tuple[str, ...]
    coefficients: tuple[complex, complex]
    flips: tuple[bool, ...]

    def __post_init__(self) -> None:
        if not self.members:
            raise ValueError("cluster needs at least one member")
        if len(self.flips) != len(self.members):
            raise ValueError("one flip flag per member required")
        if self.flips and self.flips[0]:
            raise ValueError("the first cluster member is the flip reference")
        if abs(self.coefficients[0]) == 0.0 and abs(self.coefficients[1]) == 0.0:
            raise ValueError("cluster coefficients must not both vanish")

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class ClusterDecomposition:
    """Partition of a register into clusters plus a residual of unclustered labels."""

    clusters: tuple[CorrelationCluster, ...]
    residual: tuple[str, ...]

    def cluster_of(self, label: str) -> CorrelationCluster | None:
        for cluster in self.clusters:
            if label in cluster.members:
                return cluster
        return None


@dataclass(frozen=True)
class LedgerEntry:
    tag: str
    decomposition: ClusterDecomposition
    total: int


@dataclass(frozen=True)
class CorrelationLedger:
    """Append-only record of cluster snapshots; a value, extended functionally."""

    entries: tuple[LedgerEntry, ...] = ()

    def totals(self) -> tuple[int, ...]:
        return tuple(entry.total for entry in self.entries)


@dataclass(frozen=True)
class AgreementRow:
    outcome: str
    probability: float
    agrees: tuple[bool, ...]


@dataclass(frozen=True)
class AgreementReport:
    """Per-branch and probability-weighted symbol agreement for label pairs."""

    pairs: tuple[tuple[str, str], ...]
    rows: tuple[AgreementRow, ...]
    aggregates: tuple[float, ...]


def _support_bits(vec: np.ndarray, n: int, cutoff: float) -> np.ndarray:
    """Bit matrix (n x support-size) of the amplitudes above the cutoff."""
    idx = np.flatnonzero(np.abs(vec) > cutoff)
    if idx.size == 0:
        raise ValueError("state has no support above the tolerance cutoff")
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return (idx[None, :] >> shifts[:, None]) & 1


def _covariation_classes(bits: np.ndarray, allow_relabeling: bool) -> list[list[int]]:
    """Group qubit positions whose support bits co-vary.

    Constant positions and positions that match nothing stay singletons.
    The relation is transitive for perfectly (anti)correlated bit patterns,
    so a single merge pass suffices.
    """
    n = bits.shape[0]
    varies = [bool(bits[p].any() and not bits[p].all()) for p in range(n)]
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in range(n):
        if not varies[p]:
            continue
        for q in range(p + 1, n):
            if not varies[q]:
                continue
            same = bool(np.array_equal(bits[p], bits[q]))
            opposite = allow_relabeling and bool(np.array_equal(bits[p], 1 - bits[q]))
            if same or opposite:
                parent[find(q)] = find(p)

    groups: dict[int, list[int]] = {}
    for p in range(n):
        groups.setdefault(find(p), []).append(p)
    return sorted(groups.values(), key=lambda g: g[0])


def _peel(
    labels: list[str],
    vec: np.ndarray,
    members: list[str],
    flips: list[bool],
    tol: float,
) -> tuple[tuple[complex, complex], np.ndarray] | None:
    """Try to factor ``vec`` as (Σ_k c_k |k…k⟩ over members) ⊗ rest.

    Returns the coefficients and the normalized rest vector over the
    remaining labels, or None when the reconstruction error exceeds ``tol``.
    """
    n = len(labels)
    positions = [labels.index(m) for m in members]
    psi = np.moveaxis(vec.reshape([2] * n), positions, range(len(members)))
    up_idx = tuple(int(f) for f in flips)
    down_idx = tuple(1 - int(f) for f in flips)
    v_up = psi[up_idx].reshape(-1)
    v_down = psi[down_idx].reshape(-1)

    n_up, n_down = np.linalg.norm(v_up), np.linalg.norm(v_down)
    pick = v_up if n_up >= n_down else v_down
    rest = pick / np.linalg.norm(pick)
    c_up = complex(np.vdot(rest, v_up))
    c_down = complex(np.vdot(rest, v_down))

    # Everything the factorization cannot explain: weight off the two
    # uniform slices plus the non-parallel remainders.  Computed from
    # difference vectors, not norm differences, to dodge cancellation.
    leftover = psi.copy()
    leftover[up_idx] = 0.0
    leftover[down_idx] = 0.0
    err_sq = (
        float(np.linalg.norm(leftover)) ** 2
        + float(np.linalg.norm(v_up - c_up * rest)) ** 2
        + float(np.linalg.norm(v_down - c_down * rest)) ** 2
    )
    if np.sqrt(err_sq) > tol:
        return None
    return (c_up, c_down), rest


def find_clusters(
    state: PureState,
    tol: float = DEFAULT_TOL,
    allow_relabeling: bool = False,
) -> ClusterDecomposition:
    """Finest partition of the register into correlated clusters plus residual.

    Never raises on structure: subsystems that fit no factor are reported in
    the residual.  Clusters come out sorted by their first member's register
    position, and when the residual is empty the tensor product of the
    cluster states reproduces the input to ``tol`` exactly (the terminal
    phase is folded into the last cluster).
    """
    reg = state.register
    n = len(reg)
    bits = _support_bits(state.amplitudes, n, tol)
    classes = _covariation_classes(bits, allow_relabeling)

    work_labels = list(reg.labels)
    work_vec = state.amplitudes.copy()
    clusters: list[CorrelationCluster] = []
    residual: list[str] = []

    for group in classes:
        members = [reg.labels[p] for p in group]
        first = group[0]
        flips = [bool(bits[p, 0] != bits[first, 0]) for p in group]
        peeled = _peel(work_labels, work_vec, members, flips, tol)
        if peeled is None:
            residual.extend(members)
            continue
        coeffs, work_vec = peeled
        work_labels = [lbl for lbl in work_labels if lbl not in members]
        clusters.append(CorrelationCluster(tuple(members), coeffs, tuple(flips)))

    if clusters and not residual:
        # work_vec is now the leftover scalar; fold its phase into the last
        # cluster so the product of cluster states equals the input exactly.
        phase = complex(work_vec.reshape(-1)[0])
        last = clusters[-1]
        clusters[-1] = CorrelationCluster(
            last.members,
            (last.coefficients[0] * phase, last.coefficients[1] * phase),
            last.flips,
        )

    residual.sort(key=reg.position)
    return ClusterDecomposition(tuple(clusters), tuple(residual))


def reconstruct(decomposition: ClusterDecomposition, register: Register) -> PureState:
    """Tensor product of the cluster states, laid out in register order.

    Only defined when the residual is empty and the clusters cover the
    register.
    """
    if decomposition.residual:
        raise NotClusterNormalError(
            f"cannot reconstruct: residual subsystems {decomposition.residual}"
        )
    covered = [m for cluster in decomposition.clusters for m in cluster.members]
    if sorted(covered) != sorted(register.labels):
        raise ValueError("clusters do not cover the register exactly")

    vec = np.ones(1, dtype=np.complex128)
    for cluster in decomposition.clusters:
        k = cluster.size
        part = np.zeros(2**k, dtype=np.complex128)
        up_index = sum(int(f) << (k - 1 - j) for j, f in enumerate(cluster.flips))
        part[up_index] = cluster.coefficients[0]
        part[(2**k - 1) ^ up_index] = cluster.coefficients[1]
        vec = np.kron(vec, part)

    perm = [covered.index(lbl) for lbl in register.labels]
    n = len(register)
    vec = np.transpose(vec.reshape([2] * n), perm).reshape(-1)
    return PureState(register, vec)


def cluster_measure(cluster: CorrelationCluster, tol: float = DEFAULT_TOL) -> int:
    """Correlation units carried by a cluster.

    A cluster of m subsystems with two live coefficients carries m − 1;
    a single live coefficient is a product state and carries nothing, as
    does any one-member cluster.
    """
    if cluster.size == 1:
        return 0
    live = sum(1 for c in cluster.coefficients if abs(c) > tol)
    return cluster.size - 1 if live >= 2 else 0


def total_measure(decomposition: ClusterDecomposition, tol: float = DEFAULT_TOL) -> int:
    return sum(cluster_measure(c, tol) for c in decomposition.clusters)


def ledger_record(
    ledger: CorrelationLedger,
    state: PureState,
    tag: str,
    tol: float = DEFAULT_TOL,
    allow_relabeling: bool = True,
) -> CorrelationLedger:
    """Append a cluster snapshot of ``state`` to the ledger.

    The measure is only defined in cluster normal form; a nonempty residual
    raises :class:`NotClusterNormalError` instead of recording an
    approximation.  Relabeling mode is on by default so anticorrelated pairs
    count as measure-carrying.
    """
    decomposition = find_clusters(state, tol, allow_relabeling)
    if decomposition.residual:
        raise NotClusterNormalError(
            f"state has no ledger value: residual subsystems {decomposition.residual}"
        )
    entry = LedgerEntry(tag, decomposition, total_measure(decomposition, tol))
    return CorrelationLedger(ledger.entries + (entry,))


def agreement(
    branches: BranchSet,
    pairs: Sequence[tuple[str, str]],
) -> AgreementReport:
    """Per-branch and aggregate symbol agreement for the given label pairs.

    A pair agrees on a branch iff the two outcome symbols are equal; the
    aggregate is the total probability of the agreeing branches.
    """
    positions = [(branches.position(a), branches.position(b)) for a, b in pairs]
    rows = []
    aggregates = [0.0] * len(pairs)
    for branch in branches.branches:
        agrees = tuple(branch.outcome[pa] == branch.outcome[pb] for pa, pb in positions)
        prob = branch.probability
        for i, ok in enumerate(agrees):
            if ok:
                aggregates[i] += prob
        rows.append(AgreementRow(branch.outcome, prob, agrees))
    return AgreementReport(
        tuple((a, b) for a, b in pairs), tuple(rows), tuple(aggregates)
    )


INCONSISTENT = "inconsistent"


def recover_record(branches: BranchSet, records: Sequence[str]) -> list[str]:
    """Common record symbol per branch, or ``"inconsistent"`` where they differ.

    Redundant record subsystems let later observers infer an earlier
    measurement outcome branch by branch; this reads that inference off a
    branch decomposition.
    """
    if not records:
        raise ValueError("need at least one record subsystem")
    positions = [branches.position(r) for r in records]
    result = []
    for branch in branches.branches:
        symbols = {branch.outcome[p] for p in positions}
        result.append(symbols.pop() if len(symbols) == 1 else INCONSISTENT)
    return result
