"""Bundling of device, schedule, target and constraints into one problem."""

from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np

from .device import (
    ControlledHamiltonian,
    DeviceParams,
    TargetGate,
    build_hamiltonian,
    target_ifredkin,
    target_iswap,
)
from .engine import SectorEngine
from .errors import InvalidParameterError
from .schedule import CoarsePulse, FilterOperator, ScheduleSpec, filter_matrix, idle_pulse

DEFAULT_BOUNDS = (-0.5, 3.5)

PROBLEM_NAMES = ("ifredkin+", "ifredkin-", "iswap-baseline")

PARKING_FREQ = 10.0


@dataclass
class ControlProblem:
    """One gate-synthesis task: device + schedule + target + constraints.

    ``active_controls`` lists the qubits whose detunings the optimizer may
    vary; the rest stay pinned at their idle values.  Bounds are box
    constraints on the coarse samples in GHz.  Treat instances as immutable
    after construction (the cached operators are shared).
    """

    device: DeviceParams
    schedule: ScheduleSpec
    target: TargetGate
    active_controls: tuple[int, ...] = (0, 1, 2)
    bounds: tuple[float, float] = DEFAULT_BOUNDS
    idle: tuple[float, ...] | None = None
    name: str = ""

    def __post_init__(self):
        n_q = self.device.dims.n_qubits
        if any(not 0 <= c < n_q for c in self.active_controls):
            raise InvalidParameterError(
                f"active controls {self.active_controls} out of range"
            )
        if len(set(self.active_controls)) != len(self.active_controls):
            raise InvalidParameterError("active controls must be unique")
        if self.bounds[0] >= self.bounds[1]:
            raise InvalidParameterError(f"empty box constraints {self.bounds}")
        if self.idle is None:
            self.idle = self.device.idle_detunings
        if len(self.idle) != n_q:
            raise InvalidParameterError(
                f"need {n_q} idle detunings, got {len(self.idle)}"
            )
        lo, hi = self.bounds
        for c in self.active_controls:
            if not lo <= self.idle[c] <= hi:
                raise InvalidParameterError(
                    f"idle detuning {self.idle[c]} of control {c} violates "
                    f"bounds [{lo}, {hi}]"
                )
        if not self.name:
            self.name = self.target.name

    @cached_property
    def hamiltonian(self) -> ControlledHamiltonian:
        return build_hamiltonian(self.device)

    @cached_property
    def filter_op(self) -> FilterOperator:
        return filter_matrix(self.schedule)

    @cached_property
    def engine(self) -> SectorEngine:
        return SectorEngine(
            ham=self.hamiltonian,
            spec=self.schedule,
            target=self.target,
            filter_op=self.filter_op,
            idle=np.asarray(self.idle),
        )

    @property
    def n_controls(self) -> int:
        return self.device.dims.n_qubits

    def idle_coarse(self) -> CoarsePulse:
        return idle_pulse(self.schedule, np.asarray(self.idle))

    def full_coarse(self, active_samples: np.ndarray) -> CoarsePulse:
        """Assemble a full coarse pulse from active-control samples only."""
        active_samples = np.atleast_2d(np.asarray(active_samples, float))
        samples = np.repeat(
            np.asarray(self.idle, float)[:, None], self.schedule.n_active, axis=1
        )
        for row, c in enumerate(self.active_controls):
            samples[c] = active_samples[row]
        return CoarsePulse(samples=samples, idle=np.asarray(self.idle, float))

    def with_gate_time(self, gate_time: float) -> "ControlProblem":
        spec = replace(self.schedule, gate_time=gate_time)
        return ControlProblem(
            device=self.device,
            schedule=spec,
            target=self.target,
            active_controls=self.active_controls,
            bounds=self.bounds,
            idle=self.idle,
            name=self.name,
        )


def ifredkin_problem(
    device: DeviceParams | None = None,
    schedule: ScheduleSpec | None = None,
    sign: int = +1,
    bounds: tuple[float, float] = DEFAULT_BOUNDS,
) -> ControlProblem:
    """Three-control conditional-iSWAP synthesis on the default circuit."""
    device = device if device is not None else DeviceParams()
    schedule = schedule if schedule is not None else ScheduleSpec(gate_time=56.0)
    return ControlProblem(
        device=device,
        schedule=schedule,
        target=target_ifredkin(sign),
        active_controls=(0, 1, 2),
        bounds=bounds,
    )


def iswap_baseline(
    params: DeviceParams | None = None,
    schedule: ScheduleSpec | None = None,
    bounds: tuple[float, float] = DEFAULT_BOUNDS,
) -> ControlProblem:
    """Two-control iSWAP on (S1, S2) with P parked far above the bus.

    P stays in the model (same Hilbert space, residual coupling included);
    only its detuning is frozen at the 10 GHz parking frequency.
    """
    params = params if params is not None else DeviceParams()
    freqs = list(params.qubit_freqs)
    freqs[0] = PARKING_FREQ
    parked = replace(params, qubit_freqs=tuple(freqs))
    schedule = schedule if schedule is not None else ScheduleSpec(gate_time=40.0)
    return ControlProblem(
        device=parked,
        schedule=schedule,
        target=target_iswap(),
        active_controls=(1, 2),
        bounds=bounds,
        name="iswap-baseline",
    )


def make_problem(
    name: str,
    device: DeviceParams | None = None,
    schedule: ScheduleSpec | None = None,
    bounds: tuple[float, float] = DEFAULT_BOUNDS,
) -> ControlProblem:
    """Problem factory keyed by the CLI/service problem names."""
    if name == "ifredkin+":
        return ifredkin_problem(device, schedule, sign=+1, bounds=bounds)
    if name == "ifredkin-":
        return ifredkin_problem(device, schedule, sign=-1, bounds=bounds)
    if name == "iswap-baseline":
        return iswap_baseline(device, schedule, bounds=bounds)
    raise InvalidParameterError(
        f"unknown problem {name!r}; expected one of {PROBLEM_NAMES}"
    )
