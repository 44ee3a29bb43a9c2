"""Leakage-projected gate fidelity and its gradient.

The figure of merit is

    Phi = |Tr(U_F^dag M)|^2 / d^2,   M = Q^dag U(t_g) Q,

where Q is the isometry onto the computational subspace (bus in vacuum,
qubits in {0, 1}) and d its dimension (8 for the three-qubit target, 4 for
the two-qubit baseline).  Global phases drop out through the modulus;
population that leaks out of the subspace simply shrinks |Tr|.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .device import TargetGate
from .errors import InvalidDimensionError
from .operators import SubsystemDims, computational_isometry
from .problem import ControlProblem
from .schedule import CoarsePulse, check_coarse


@dataclass
class FidelityResult:
    """Fidelity value, complex overlap, and (optionally) the coarse gradient."""

    phi: float
    overlap: complex
    gradient: np.ndarray | None = None  # (n_controls, n_active)


def projected_fidelity(
    unitary: np.ndarray,
    target: TargetGate,
    dims: SubsystemDims | None = None,
) -> FidelityResult:
    """Fidelity of a full-space unitary against a computational-subspace target.

    The unitary is compressed with the subspace isometry of the target's
    qubits; the trace of the compression against the target is identical to
    the projected-product form but stays in d dimensions.
    """
    dims = dims if dims is not None else SubsystemDims()
    u = np.asarray(unitary, dtype=complex)
    if u.shape != (dims.total, dims.total):
        raise InvalidDimensionError(
            f"unitary shape {u.shape} does not match space dimension {dims.total}"
        )
    q = computational_isometry(dims, target.qubits)
    m = q.conj().T @ u @ q
    d = target.dim
    z = np.trace(target.matrix.conj().T @ m) / d
    return FidelityResult(phi=float(abs(z) ** 2), overlap=complex(z))


def pulse_fidelity(problem: ControlProblem, coarse: CoarsePulse) -> FidelityResult:
    """Fidelity of a coarse pulse, without the gradient."""
    check_coarse(coarse, problem.schedule)
    phi, z = problem.engine.fidelity(coarse.samples)
    return FidelityResult(phi=phi, overlap=z)


def fidelity_and_gradient(problem: ControlProblem, coarse: CoarsePulse) -> FidelityResult:
    """Fidelity plus exact dPhi/d(coarse sample) for every control row.

    The per-step derivative is evaluated in the step eigenbasis (no
    first-order-in-dt approximation) and chained through the Gaussian
    filter by its adjoint; rows of the returned gradient follow the device
    control order, including pinned controls (their entries are the true
    sensitivities, the optimizer just ignores them).
    """
    check_coarse(coarse, problem.schedule)
    phi, z, grad = problem.engine.fidelity_and_gradient(coarse.samples)
    return FidelityResult(phi=phi, overlap=z, gradient=grad)
