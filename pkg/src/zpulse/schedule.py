"""Piecewise-constant detuning schedules and the Gaussian smoothing filter.

Controls are sampled on a coarse grid (1 ns by default, the waveform
generator resolution) inside an active window that excludes a settling
buffer at each edge; the buffers stay pinned at the idle detunings.  For
simulation the coarse staircase is expanded to a fine grid (0.1 ns) and
convolved with a normalized Gaussian kernel.  Sample m of a fine pulse is
the value applied during [m*fine_dt, (m+1)*fine_dt); the filter evaluates
the smoothed waveform at interval midpoints so that refining the fine grid
leaves the physical pulse unchanged to quadrature accuracy.

The whole coarse -> fine map is affine,

    fine_i = W @ coarse_active_i + idle_i * (1 - W @ 1),

which is what the gradient chain rule needs: d(fine)/d(coarse) = W.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridMismatchError, InvalidParameterError

KERNEL_CUTOFF_SIGMAS = 5.0


def _is_multiple(big: float, small: float) -> bool:
    ratio = big / small
    return abs(ratio - round(ratio)) < 1e-9


@dataclass(frozen=True)
class ScheduleSpec:
    """Time grids for one gate: total duration, resolutions, buffers, filter width (ns)."""

    gate_time: float
    coarse_dt: float = 1.0
    fine_dt: float = 0.1
    buffer: float = 4.0
    filter_sigma: float = 0.4

    def __post_init__(self):
        if self.gate_time <= 2 * self.buffer:
            raise InvalidParameterError(
                f"gate_time {self.gate_time} ns must exceed twice the buffer "
                f"({2 * self.buffer} ns)"
            )
        if self.fine_dt <= 0 or self.coarse_dt <= 0:
            raise InvalidParameterError("time steps must be positive")
        if not _is_multiple(self.coarse_dt, self.fine_dt):
            raise InvalidParameterError(
                f"coarse_dt {self.coarse_dt} must be an integer multiple of "
                f"fine_dt {self.fine_dt}"
            )
        if not _is_multiple(self.gate_time, self.coarse_dt):
            raise InvalidParameterError(
                f"gate_time {self.gate_time} must be an integer multiple of "
                f"coarse_dt {self.coarse_dt}"
            )
        if not _is_multiple(self.buffer, self.coarse_dt):
            raise InvalidParameterError(
                f"buffer {self.buffer} must be an integer multiple of "
                f"coarse_dt {self.coarse_dt}"
            )
        if self.filter_sigma <= 0:
            raise InvalidParameterError("filter_sigma must be positive")

    @property
    def hold_ratio(self) -> int:
        return round(self.coarse_dt / self.fine_dt)

    @property
    def n_fine(self) -> int:
        return round(self.gate_time / self.fine_dt)

    @property
    def n_coarse(self) -> int:
        return round(self.gate_time / self.coarse_dt)

    @property
    def n_buffer(self) -> int:
        """Coarse samples inside one buffer."""
        return round(self.buffer / self.coarse_dt)

    @property
    def n_active(self) -> int:
        return self.n_coarse - 2 * self.n_buffer

    @property
    def fine_times(self) -> np.ndarray:
        """Start time of each fine interval."""
        return np.arange(self.n_fine) * self.fine_dt

    @property
    def coarse_times(self) -> np.ndarray:
        """Start time of each coarse interval (buffers included)."""
        return np.arange(self.n_coarse) * self.coarse_dt


@dataclass(frozen=True)
class CoarsePulse:
    """Active-window detunings (GHz) per control plus the pinned idle values."""

    samples: np.ndarray  # (n_controls, n_active)
    idle: np.ndarray  # (n_controls,)

    def __post_init__(self):
        object.__setattr__(self, "samples", np.atleast_2d(np.asarray(self.samples, float)))
        object.__setattr__(self, "idle", np.asarray(self.idle, float))
        if self.idle.shape != (self.samples.shape[0],):
            raise GridMismatchError(
                f"idle shape {self.idle.shape} does not match "
                f"{self.samples.shape[0]} controls"
            )

    @property
    def n_controls(self) -> int:
        return self.samples.shape[0]

    def full_samples(self, spec: ScheduleSpec) -> np.ndarray:
        """(n_controls, n_coarse) staircase including the idle buffers."""
        check_coarse(self, spec)
        n_buf = spec.n_buffer
        full = np.repeat(self.idle[:, None], spec.n_coarse, axis=1)
        full[:, n_buf : n_buf + spec.n_active] = self.samples
        return full


@dataclass(frozen=True)
class FinePulse:
    """Filtered detunings (GHz) per control on the fine simulation grid."""

    samples: np.ndarray  # (n_controls, n_fine)
    idle: np.ndarray  # (n_controls,)

    def __post_init__(self):
        object.__setattr__(self, "samples", np.atleast_2d(np.asarray(self.samples, float)))
        object.__setattr__(self, "idle", np.asarray(self.idle, float))
        if self.idle.shape != (self.samples.shape[0],):
            raise GridMismatchError(
                f"idle shape {self.idle.shape} does not match "
                f"{self.samples.shape[0]} controls"
            )

    @property
    def n_controls(self) -> int:
        return self.samples.shape[0]


def check_coarse(pulse: CoarsePulse, spec: ScheduleSpec):
    if pulse.samples.shape[1] != spec.n_active:
        raise GridMismatchError(
            f"coarse pulse has {pulse.samples.shape[1]} active samples, "
            f"schedule expects {spec.n_active}"
        )


def check_fine(pulse: FinePulse, spec: ScheduleSpec):
    if pulse.samples.shape[1] != spec.n_fine:
        raise GridMismatchError(
            f"fine pulse has {pulse.samples.shape[1]} samples, "
            f"schedule expects {spec.n_fine}"
        )


def idle_pulse(spec: ScheduleSpec, idle) -> CoarsePulse:
    """Coarse pulse resting at the idle detunings."""
    idle = np.asarray(idle, float)
    samples = np.repeat(idle[:, None], spec.n_active, axis=1)
    return CoarsePulse(samples=samples, idle=idle)


def zero_order_hold(pulse: CoarsePulse, spec: ScheduleSpec) -> FinePulse:
    """Expand the coarse staircase to the fine grid (buffers take idle values)."""
    full = pulse.full_samples(spec)
    fine = np.repeat(full, spec.hold_ratio, axis=1)
    return FinePulse(samples=fine, idle=pulse.idle.copy())


def gaussian_kernel(spec: ScheduleSpec) -> np.ndarray:
    """Normalized Gaussian kernel on the fine grid, truncated at +/-5 sigma."""
    half = int(np.floor(KERNEL_CUTOFF_SIGMAS * spec.filter_sigma / spec.fine_dt + 1e-9))
    offsets = np.arange(-half, half + 1) * spec.fine_dt
    kernel = np.exp(-0.5 * (offsets / spec.filter_sigma) ** 2)
    return kernel / kernel.sum()


def gaussian_filter(fine: FinePulse, spec: ScheduleSpec) -> FinePulse:
    """Convolve each control with the Gaussian kernel, extending edges at idle."""
    check_fine(fine, spec)
    kernel = gaussian_kernel(spec)
    half = (len(kernel) - 1) // 2
    out = np.empty_like(fine.samples)
    for i in range(fine.n_controls):
        padded = np.concatenate(
            [
                np.full(half, fine.idle[i]),
                fine.samples[i],
                np.full(half, fine.idle[i]),
            ]
        )
        out[i] = np.convolve(padded, kernel, mode="valid")
    return FinePulse(samples=out, idle=fine.idle.copy())


@dataclass(frozen=True)
class FilterOperator:
    """Affine coarse -> fine map: fine = W @ active + idle * idle_response."""

    weights: np.ndarray  # (n_fine, n_active)
    idle_response: np.ndarray  # (n_fine,)

    def apply(self, pulse: CoarsePulse) -> FinePulse:
        fine = pulse.samples @ self.weights.T + np.outer(pulse.idle, self.idle_response)
        return FinePulse(samples=fine, idle=pulse.idle.copy())

    def adjoint(self, fine_grad: np.ndarray) -> np.ndarray:
        """Pull a (n_controls, n_fine) fine-grid gradient back to coarse samples."""
        return np.atleast_2d(fine_grad) @ self.weights


def filter_matrix(spec: ScheduleSpec) -> FilterOperator:
    """Materialize the filtered zero-order hold as an explicit linear operator.

    Column k is the response of the whole pipeline to a unit coarse sample at
    active position k with idle pinned to zero; by linearity the idle response
    is whatever weight is left over (rows sum to one across active + idle
    sources, because the kernel is normalized).
    """
    probes = CoarsePulse(
        samples=np.eye(spec.n_active), idle=np.zeros(spec.n_active)
    )
    response = gaussian_filter(zero_order_hold(probes, spec), spec)
    weights = response.samples.T  # (n_fine, n_active)
    idle_response = 1.0 - weights.sum(axis=1)
    return FilterOperator(weights=weights, idle_response=idle_response)


def shaped_pulse(pulse: CoarsePulse, spec: ScheduleSpec) -> FinePulse:
    """Convenience: filtered zero-order hold of a coarse pulse."""
    return gaussian_filter(zero_order_hold(pulse, spec), spec)
