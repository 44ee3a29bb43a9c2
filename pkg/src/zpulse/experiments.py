"""Reference studies: headline synthesis, speed-limit sweeps, entangler check."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError
from .operators import SubsystemDims, basis_state
from .optimize import OptimizeResult, OptimizerOptions, optimize
from .problem import ControlProblem, iswap_baseline

__all__ = [
    "SweepPoint",
    "SweepResult",
    "speed_limit_sweep",
    "iswap_baseline",
    "entangler_check",
    "resample_active",
]


@dataclass(frozen=True)
class SweepPoint:
    gate_time: float
    best_fidelity: float
    restarts_used: int
    iterations: int
    warm_started: bool


@dataclass
class SweepResult:
    points: list[SweepPoint]
    target_fidelity: float
    results: list[OptimizeResult]

    @property
    def minimal_feasible(self) -> float | None:
        """Shortest gate time that reached the target fidelity, if any."""
        for p in self.points:
            if p.best_fidelity >= self.target_fidelity:
                return p.gate_time
        return None


def resample_active(samples: np.ndarray, n_new: int, idle=None) -> np.ndarray:
    """Fit active-window samples onto a longer active window.

    The shorter pulse is kept verbatim and the extra tail is filled with the
    idle values, so the warm start embeds the previous solution; with the
    reference idle detunings an even number of padded nanoseconds winds whole
    phase turns and the embedded pulse keeps (nearly) its fidelity.  Falls
    back to linear stretching when no idle values are given.
    """
    samples = np.atleast_2d(np.asarray(samples, float))
    n_old = samples.shape[1]
    if n_old == n_new:
        return samples.copy()
    if idle is not None and n_new > n_old:
        idle = np.asarray(idle, float)
        pad = np.repeat(idle[:, None], n_new - n_old, axis=1)
        return np.concatenate([samples, pad], axis=1)
    x_old = (np.arange(n_old) + 0.5) / n_old
    x_new = (np.arange(n_new) + 0.5) / n_new
    return np.stack([np.interp(x_new, x_old, row) for row in samples])


def speed_limit_sweep(
    template: ControlProblem,
    gate_times,
    opts: OptimizerOptions | None = None,
    warm_start: bool = True,
    stop_after_feasible: int | None = None,
) -> SweepResult:
    """Optimize the same problem over increasing gate times.

    With ``warm_start`` the best pulse found at the previous (shorter) time
    is stretched onto the new active window and used as the first restart's
    initial guess.  ``stop_after_feasible`` optionally truncates the sweep
    that many points after the target has first been reached.
    """
    gate_times = [float(t) for t in gate_times]
    if not gate_times:
        raise InvalidParameterError("gate_times must not be empty")
    if any(t2 <= t1 for t1, t2 in zip(gate_times, gate_times[1:])):
        raise InvalidParameterError("gate_times must be strictly increasing")
    opts = opts if opts is not None else OptimizerOptions()

    points: list[SweepPoint] = []
    results: list[OptimizeResult] = []
    prev_best: np.ndarray | None = None
    feasible_seen = 0
    for t_g in gate_times:
        problem = template.with_gate_time(t_g)
        guesses = None
        warm = False
        if warm_start and prev_best is not None:
            idle_rows = np.asarray(problem.idle, float)[list(problem.active_controls)]
            guesses = [resample_active(prev_best, problem.schedule.n_active, idle_rows)]
            warm = True
        res = optimize(problem, opts, initial_guesses=guesses)
        points.append(
            SweepPoint(
                gate_time=t_g,
                best_fidelity=res.best_fidelity,
                restarts_used=res.restarts_used,
                iterations=res.iterations,
                warm_started=warm,
            )
        )
        results.append(res)
        prev_best = res.best_pulse.samples[list(problem.active_controls)]
        if res.best_fidelity >= opts.target_fidelity:
            feasible_seen += 1
            if stop_after_feasible is not None and feasible_seen > stop_after_feasible:
                break
    return SweepResult(
        points=points, target_fidelity=opts.target_fidelity, results=results
    )


def entangler_check(unitary: np.ndarray, dims: SubsystemDims | None = None) -> float:
    """Overlap of U applied to (|001> + |101>)/sqrt(2) with (|001> + i|110>)/sqrt(2).

    Both states sit in the computational subspace with the bus in vacuum;
    the squared modulus makes the result global-phase free.
    """
    dims = dims if dims is not None else SubsystemDims()
    psi_in = (basis_state("0|001", dims) + basis_state("0|101", dims)) / np.sqrt(2.0)
    psi_target = (basis_state("0|001", dims) + 1j * basis_state("0|110", dims)) / np.sqrt(2.0)
    out = np.asarray(unitary, dtype=complex) @ psi_in
    return float(abs(np.vdot(psi_target, out)) ** 2)
