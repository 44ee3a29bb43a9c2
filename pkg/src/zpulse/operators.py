"""Truncated-oscillator operators on the bus + three-qubit Hilbert space.

The composite space is an ordered tensor product (bus, P, S1, S2), bus most
significant, each factor truncated to a small number of levels (default 3).
Basis states are labelled "b|pqr", e.g. "0|110" for one excitation in P and
one in S1.  Everything here is a plain dense complex ndarray.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidDimensionError, InvalidLabelError

QUBIT_NAMES = ("P", "S1", "S2")


@dataclass(frozen=True)
class SubsystemDims:
    """Level truncations per subsystem, ordered (bus, P, S1, S2)."""

    levels: tuple[int, ...] = (3, 3, 3, 3)

    def __post_init__(self):
        if len(self.levels) != 4:
            raise InvalidDimensionError(
                f"expected 4 subsystems (bus, P, S1, S2), got {len(self.levels)}"
            )
        if any(n < 2 for n in self.levels):
            raise InvalidDimensionError(f"every truncation must be >= 2: {self.levels}")
        object.__setattr__(self, "levels", tuple(int(n) for n in self.levels))

    @property
    def total(self) -> int:
        return int(np.prod(self.levels))

    @property
    def n_qubits(self) -> int:
        return len(self.levels) - 1


def annihilation_op(levels: int) -> np.ndarray:
    """Ladder operator a with a[n, n+1] = sqrt(n+1) on a truncated oscillator."""
    if levels < 2:
        raise InvalidDimensionError(f"annihilation operator needs >= 2 levels, got {levels}")
    a = np.zeros((levels, levels), dtype=complex)
    ns = np.arange(levels - 1)
    a[ns, ns + 1] = np.sqrt(ns + 1.0)
    return a


def number_op(levels: int) -> np.ndarray:
    """Number operator diag(0, 1, ..., levels-1)."""
    if levels < 2:
        raise InvalidDimensionError(f"number operator needs >= 2 levels, got {levels}")
    return np.diag(np.arange(levels, dtype=float)).astype(complex)


def embed(op: np.ndarray, subsystem: int, dims: SubsystemDims) -> np.ndarray:
    """Embed a single-subsystem operator as id (x) ... (x) op (x) ... (x) id."""
    op = np.asarray(op, dtype=complex)
    if not 0 <= subsystem < len(dims.levels):
        raise InvalidDimensionError(f"subsystem index {subsystem} out of range")
    n = dims.levels[subsystem]
    if op.shape != (n, n):
        raise InvalidDimensionError(
            f"operator shape {op.shape} does not match subsystem {subsystem} "
            f"with {n} levels"
        )
    out = np.eye(1, dtype=complex)
    for k, levels in enumerate(dims.levels):
        out = np.kron(out, op if k == subsystem else np.eye(levels, dtype=complex))
    return out


def parse_label(label: str, dims: SubsystemDims) -> tuple[int, ...]:
    """Parse "b|pqr" into per-subsystem occupations, validating ranges."""
    if "|" not in label:
        raise InvalidLabelError(f"label {label!r} is missing the 'b|' separator")
    bus_part, qubit_part = label.split("|", 1)
    digits = [bus_part] + list(qubit_part)
    if len(digits) != len(dims.levels):
        raise InvalidLabelError(
            f"label {label!r} has {len(digits)} occupations, expected {len(dims.levels)}"
        )
    try:
        occ = tuple(int(d) for d in digits)
    except ValueError as exc:
        raise InvalidLabelError(f"label {label!r} has non-integer occupation") from exc
    for k, (o, n) in enumerate(zip(occ, dims.levels)):
        if not 0 <= o < n:
            raise InvalidLabelError(
                f"label {label!r}: occupation {o} out of range for subsystem {k} "
                f"({n} levels)"
            )
    return occ


def format_label(occupations: tuple[int, ...] | list[int]) -> str:
    """Render occupations as the "b|pqr" string."""
    occ = list(occupations)
    return f"{occ[0]}|" + "".join(str(o) for o in occ[1:])


def basis_index(label: str, dims: SubsystemDims) -> int:
    """Mixed-radix row-major index of a labelled basis state, bus most significant."""
    occ = parse_label(label, dims)
    idx = 0
    for o, n in zip(occ, dims.levels):
        idx = idx * n + o
    return idx


def basis_label(index: int, dims: SubsystemDims) -> str:
    """Inverse of basis_index."""
    if not 0 <= index < dims.total:
        raise InvalidLabelError(f"index {index} out of range for dimension {dims.total}")
    occ = []
    rem = index
    for n in reversed(dims.levels):
        occ.append(rem % n)
        rem //= n
    return format_label(list(reversed(occ)))


def basis_state(label: str, dims: SubsystemDims) -> np.ndarray:
    """Unit vector for a labelled basis state."""
    psi = np.zeros(dims.total, dtype=complex)
    psi[basis_index(label, dims)] = 1.0
    return psi


def computational_states(dims: SubsystemDims, qubits: tuple[int, ...] = (0, 1, 2)) -> list[int]:
    """Full-space indices of the computational subspace, in binary order.

    The subspace keeps the bus in vacuum, lets each qubit in ``qubits`` range
    over {0, 1} (first listed qubit most significant), and pins every other
    qubit to its ground state.  For the default three active qubits this is
    the rank-8 space the gate fidelity is measured on.
    """
    n_q = dims.n_qubits
    if any(not 0 <= q < n_q for q in qubits):
        raise InvalidDimensionError(f"qubit indices {qubits} out of range")
    indices = []
    for bits in range(2 ** len(qubits)):
        occ = [0] * (n_q + 1)
        for pos, q in enumerate(qubits):
            occ[1 + q] = (bits >> (len(qubits) - 1 - pos)) & 1
        indices.append(basis_index(format_label(occ), dims))
    return indices


def computational_isometry(dims: SubsystemDims, qubits: tuple[int, ...] = (0, 1, 2)) -> np.ndarray:
    """Isometry Q (total x 2^k) whose columns are the computational states."""
    idx = computational_states(dims, qubits)
    q = np.zeros((dims.total, len(idx)), dtype=complex)
    q[idx, np.arange(len(idx))] = 1.0
    return q


def computational_projector(dims: SubsystemDims) -> np.ndarray:
    """Orthogonal projector onto bus vacuum with every qubit in {0, 1}."""
    q = computational_isometry(dims)
    return q @ q.conj().T


def excitation_number(occupations: tuple[int, ...]) -> int:
    return int(sum(occupations))


def occupations_table(dims: SubsystemDims) -> np.ndarray:
    """(total, n_subsystems) array of occupations for every basis index."""
    table = np.zeros((dims.total, len(dims.levels)), dtype=int)
    for idx in range(dims.total):
        rem = idx
        for k in range(len(dims.levels) - 1, -1, -1):
            table[idx, k] = rem % dims.levels[k]
            rem //= dims.levels[k]
    return table


@dataclass(frozen=True)
class ExcitationBlocks:
    """Partition of the basis into total-excitation sectors.

    The coupling terms move single quanta between bus and qubits, so the
    Hamiltonian never mixes sectors; propagation and gradients can be done
    block by block.  ``order`` is the basis permutation that makes blocks
    contiguous, ``slices`` indexes into the permuted basis.
    """

    dims: SubsystemDims
    order: np.ndarray
    slices: tuple[slice, ...]
    sector_of: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, dims: SubsystemDims) -> "ExcitationBlocks":
        table = occupations_table(dims)
        totals = table.sum(axis=1)
        order = np.argsort(totals, kind="stable")
        sorted_totals = totals[order]
        slices = []
        for n in range(int(sorted_totals.max()) + 1):
            members = np.nonzero(sorted_totals == n)[0]
            slices.append(slice(int(members[0]), int(members[-1]) + 1))
        return cls(dims=dims, order=order, slices=tuple(slices), sector_of=totals)

    def permuted_position(self, full_index: int) -> int:
        """Position of a full-space basis index inside the permuted basis."""
        return int(np.nonzero(self.order == full_index)[0][0])
