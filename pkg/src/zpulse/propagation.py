"""Schroedinger propagation of piecewise-constant pulses.

Each fine step is propagated exactly with the matrix exponential of its
(constant) Hamiltonian, computed through the Hermitian eigendecomposition
H = V diag(lam) V^dag, U_step = V exp(-i lam dt) V^dag.  The eigenbasis is
what the gradient code reuses, which is why this route is preferred over
Pade scaling-and-squaring here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .device import ControlledHamiltonian
from .errors import GridMismatchError, InvalidLabelError, InvalidOperatorError
from .operators import SubsystemDims, basis_index, occupations_table
from .schedule import FinePulse, ScheduleSpec, check_fine

HERMITICITY_TOL = 1e-10


def step_propagator(hamiltonian: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i H dt) for a Hermitian H via eigendecomposition."""
    h = np.asarray(hamiltonian, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise InvalidOperatorError(f"expected a square matrix, got shape {h.shape}")
    if np.max(np.abs(h - h.conj().T)) > HERMITICITY_TOL:
        raise InvalidOperatorError(
            "Hamiltonian is not Hermitian within "
            f"{HERMITICITY_TOL} (max deviation "
            f"{np.max(np.abs(h - h.conj().T)):.3e})"
        )
    lam, vec = np.linalg.eigh(h)
    phases = np.exp(-1j * lam * dt)
    return (vec * phases[None, :]) @ vec.conj().T


def _hamiltonian_stack(ham: ControlledHamiltonian, fine: FinePulse) -> np.ndarray:
    """(n_fine, dim, dim) stack of per-step Hamiltonians."""
    dim = ham.drift.shape[0]
    n = fine.samples.shape[1]
    diags = np.stack([np.diag(op).real for op in ham.control_ops])  # (n_controls, dim)
    stack = np.broadcast_to(ham.drift, (n, dim, dim)).copy()
    idx = np.arange(dim)
    stack[:, idx, idx] += fine.samples.T @ diags
    return stack


@dataclass
class Propagation:
    """Forward propagation record for one fine-grid pulse."""

    total: np.ndarray
    dt: float
    step_unitaries: np.ndarray | None = None  # (n_fine, dim, dim)
    cumulative: np.ndarray | None = None  # cumulative[m] = U_m ... U_1
    eigenvalues: np.ndarray | None = None  # (n_fine, dim)
    eigenvectors: np.ndarray | None = None  # (n_fine, dim, dim)


def total_propagator(
    ham: ControlledHamiltonian,
    fine: FinePulse,
    spec: ScheduleSpec,
    retain_steps: bool = True,
    retain_cumulative: bool = False,
    retain_eig: bool = False,
) -> Propagation:
    """Chain all fine-step propagators into U(t_g) = U_N ... U_2 U_1."""
    check_fine(fine, spec)
    if fine.n_controls != len(ham.control_ops):
        raise GridMismatchError(
            f"pulse has {fine.n_controls} controls, Hamiltonian has "
            f"{len(ham.control_ops)}"
        )
    stack = _hamiltonian_stack(ham, fine)
    lam, vec = np.linalg.eigh(stack)
    phases = np.exp(-1j * lam * spec.fine_dt)
    steps = (vec * phases[:, None, :]) @ vec.conj().transpose(0, 2, 1)

    dim = stack.shape[1]
    cumulative = np.empty_like(steps) if retain_cumulative else None
    total = np.eye(dim, dtype=complex)
    for m in range(steps.shape[0]):
        total = steps[m] @ total
        if cumulative is not None:
            cumulative[m] = total
    return Propagation(
        total=total,
        dt=spec.fine_dt,
        step_unitaries=steps if retain_steps else None,
        cumulative=cumulative,
        eigenvalues=lam if retain_eig else None,
        eigenvectors=vec if retain_eig else None,
    )


@dataclass
class Trajectory:
    """Populations of watched basis states and aggregate groups over time."""

    times: np.ndarray  # (n_fine + 1,)
    populations: dict[str, np.ndarray]
    dims: SubsystemDims

    def column_names(self) -> list[str]:
        return list(self.populations.keys())


def leakage_indices(dims: SubsystemDims) -> list[int]:
    """Basis states with the bus in vacuum and some qubit above its qubit levels."""
    table = occupations_table(dims)
    out = []
    for idx in range(dims.total):
        occ = table[idx]
        if occ[0] == 0 and any(o >= 2 for o in occ[1:]):
            out.append(idx)
    return out


def trajectory(
    ham: ControlledHamiltonian,
    fine: FinePulse,
    spec: ScheduleSpec,
    initial,
    watch: list[str] | None = None,
) -> Trajectory:
    """Propagate an initial state and record watched populations per fine step.

    ``initial`` is either a basis label ("0|110") or a normalized state
    vector.  ``watch`` lists basis labels; the aggregate groups "leak" (bus
    in vacuum, any qubit at level >= 2) and "other" (everything else not
    watched) are always appended.
    """
    dims = ham.dims
    if isinstance(initial, str):
        psi = np.zeros(dims.total, dtype=complex)
        psi[basis_index(initial, dims)] = 1.0
    else:
        psi = np.asarray(initial, dtype=complex)
        if psi.shape != (dims.total,):
            raise InvalidLabelError(
                f"initial state has shape {psi.shape}, expected ({dims.total},)"
            )
        norm = np.linalg.norm(psi)
        if abs(norm - 1.0) > 1e-9:
            raise InvalidLabelError(f"initial state is not normalized (|psi| = {norm})")

    watch = list(watch) if watch is not None else []
    watch_idx = [basis_index(label, dims) for label in watch]

    check_fine(fine, spec)
    stack = _hamiltonian_stack(ham, fine)
    lam, vec = np.linalg.eigh(stack)
    phases = np.exp(-1j * lam * spec.fine_dt)

    n = stack.shape[0]
    states = np.empty((n + 1, dims.total), dtype=complex)
    states[0] = psi
    for m in range(n):
        psi = vec[m] @ (phases[m] * (vec[m].conj().T @ psi))
        states[m + 1] = psi

    pops = np.abs(states) ** 2
    leak_idx = [i for i in leakage_indices(dims) if i not in watch_idx]
    accounted = set(watch_idx) | set(leak_idx)
    other_idx = [i for i in range(dims.total) if i not in accounted]

    populations: dict[str, np.ndarray] = {}
    for label, idx in zip(watch, watch_idx):
        populations[label] = pops[:, idx]
    populations["leak"] = pops[:, leak_idx].sum(axis=1)
    populations["other"] = pops[:, other_idx].sum(axis=1)

    times = np.arange(n + 1) * spec.fine_dt
    return Trajectory(times=times, populations=populations, dims=dims)
