"""Circuit model: frequency-tunable qubits exchanging quanta through a bus.

Unit conventions used everywhere in this package:

* user-facing frequencies are cyclic (GHz, the "/2pi" values); builders
  multiply by 2*pi internally,
* time is in ns, hbar = 1, so 2*pi * GHz * ns is a dimensionless phase.

In the frame co-rotating with the bus, the bus term drops out and each
qubit keeps only its detuning from the bus.  The detunings delta_i(t) are
the controls; everything else (anharmonicity ladder, exchange coupling) is
drift.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidDimensionError, InvalidParameterError
from .operators import (
    QUBIT_NAMES,
    SubsystemDims,
    annihilation_op,
    embed,
    number_op,
)

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class DeviceParams:
    """Circuit parameters, all cyclic frequencies in GHz.

    ``qubit_freqs`` are the idle (off-resonant) qubit frequencies; the idle
    detunings are ``qubit_freqs - bus_freq``.  ``rot_freq`` is the rotating
    frame frequency and defaults to the bus frequency, which is the only
    frame this model implements.
    """

    bus_freq: float = 6.5
    qubit_freqs: tuple[float, ...] = (7.5, 8.0, 8.5)
    anharmonicities: tuple[float, ...] = (-0.200, -0.300, -0.400)
    couplings: tuple[float, ...] = (0.030, 0.045, 0.060)
    rot_freq: float | None = None
    dims: SubsystemDims = field(default_factory=SubsystemDims)

    def __post_init__(self):
        n_q = self.dims.n_qubits
        for name, values in (
            ("qubit_freqs", self.qubit_freqs),
            ("anharmonicities", self.anharmonicities),
            ("couplings", self.couplings),
        ):
            if len(values) != n_q:
                raise InvalidParameterError(
                    f"{name} must have {n_q} entries, got {len(values)}"
                )
        if any(g <= 0 for g in self.couplings):
            raise InvalidParameterError(f"couplings must be positive: {self.couplings}")
        if any(a >= 0 for a in self.anharmonicities):
            raise InvalidParameterError(
                f"anharmonicities must be negative: {self.anharmonicities}"
            )
        if self.rot_freq is None:
            object.__setattr__(self, "rot_freq", self.bus_freq)
        elif abs(self.rot_freq - self.bus_freq) > 1e-12:
            raise InvalidParameterError(
                "only the bus-frequency rotating frame is supported "
                f"(rot_freq={self.rot_freq}, bus_freq={self.bus_freq})"
            )
        object.__setattr__(self, "qubit_freqs", tuple(float(f) for f in self.qubit_freqs))
        object.__setattr__(
            self, "anharmonicities", tuple(float(a) for a in self.anharmonicities)
        )
        object.__setattr__(self, "couplings", tuple(float(g) for g in self.couplings))

    @property
    def idle_detunings(self) -> tuple[float, ...]:
        return tuple(f - self.bus_freq for f in self.qubit_freqs)


def canonical_params() -> DeviceParams:
    """The reference parameter set (bus 6.5 GHz, qubits 7.5/8.0/8.5 GHz)."""
    return DeviceParams()


@dataclass(frozen=True)
class ControlledHamiltonian:
    """Drift plus one diagonal control operator per qubit, angular units.

    H(t) = drift + sum_i delta_i(t) * control_ops[i], where delta_i(t) is a
    cyclic detuning in GHz (the 2*pi conversion is baked into control_ops).
    """

    drift: np.ndarray
    control_ops: tuple[np.ndarray, ...]
    control_labels: tuple[str, ...]
    dims: SubsystemDims

    def at(self, detunings) -> np.ndarray:
        """Hamiltonian at the given per-qubit detunings (GHz)."""
        detunings = np.asarray(detunings, dtype=float)
        if detunings.shape != (len(self.control_ops),):
            raise InvalidDimensionError(
                f"expected {len(self.control_ops)} detunings, got shape {detunings.shape}"
            )
        h = self.drift.copy()
        for d, op in zip(detunings, self.control_ops):
            h += d * op
        return h


def build_hamiltonian(params: DeviceParams) -> ControlledHamiltonian:
    """Rotating-frame Hamiltonian split into drift and detuning controls.

    Drift carries the anharmonicity ladder (-Delta_i/2 * n_i + Delta_i/2 * n_i^2)
    and the bus-qubit exchange g_i (a^dag b_i + a b_i^dag); each control
    operator is 2*pi times the embedded qubit number operator, so that a
    control coefficient of delta GHz contributes 2*pi*delta*n_i to H.
    """
    dims = params.dims
    total = dims.total
    a_bus = embed(annihilation_op(dims.levels[0]), 0, dims)
    drift = np.zeros((total, total), dtype=complex)
    control_ops = []
    for i in range(dims.n_qubits):
        n_i = embed(number_op(dims.levels[1 + i]), 1 + i, dims)
        b_i = embed(annihilation_op(dims.levels[1 + i]), 1 + i, dims)
        delta_i = params.anharmonicities[i]
        g_i = params.couplings[i]
        drift += TWO_PI * (-0.5 * delta_i) * n_i
        drift += TWO_PI * (0.5 * delta_i) * (n_i @ n_i)
        drift += TWO_PI * g_i * (a_bus.conj().T @ b_i + a_bus @ b_i.conj().T)
        control_ops.append(TWO_PI * n_i)
    labels = tuple(f"delta_{name}" for name in QUBIT_NAMES[: dims.n_qubits])
    return ControlledHamiltonian(
        drift=drift, control_ops=tuple(control_ops), control_labels=labels, dims=dims
    )


@dataclass(frozen=True)
class TargetGate:
    """Unitary on a computational subspace.

    ``qubits`` names which qubits the matrix acts on (first index most
    significant); the remaining qubits and the bus are taken to sit in their
    ground states.
    """

    matrix: np.ndarray
    qubits: tuple[int, ...]
    name: str

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        d = 2 ** len(self.qubits)
        if m.shape != (d, d):
            raise InvalidDimensionError(
                f"target on {len(self.qubits)} qubits must be {d}x{d}, got {m.shape}"
            )
        if np.max(np.abs(m.conj().T @ m - np.eye(d))) > 1e-12:
            raise InvalidParameterError(f"target {self.name} is not unitary to 1e-12")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def target_ifredkin(sign: int = +1) -> TargetGate:
    """Conditional iSWAP on (S1, S2) controlled by P; sign picks +/-i."""
    if sign not in (+1, -1):
        raise InvalidParameterError(f"sign must be +1 or -1, got {sign}")
    m = np.eye(8, dtype=complex)
    m[5, 5] = m[6, 6] = 0.0
    m[5, 6] = m[6, 5] = sign * 1j
    return TargetGate(matrix=m, qubits=(0, 1, 2), name=f"ifredkin{'+' if sign > 0 else '-'}")


def target_iswap() -> TargetGate:
    """Two-qubit iSWAP on (S1, S2): |01> <-> i|10>, identity on |00>, |11>."""
    m = np.eye(4, dtype=complex)
    m[1, 1] = m[2, 2] = 0.0
    m[1, 2] = m[2, 1] = 1j
    return TargetGate(matrix=m, qubits=(1, 2), name="iswap")
