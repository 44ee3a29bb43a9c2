"""CSV and JSON artifact formats emitted by the CLI.

All numeric payloads are written with 17 significant digits so that every
file round-trips bit-identically through its own reader.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import GridMismatchError
from .operators import QUBIT_NAMES
from .optimize import IterationRecord, OptimizeResult
from .propagation import Trajectory
from .schedule import CoarsePulse, FinePulse, ScheduleSpec, shaped_pulse

RESULT_SCHEMA = 1

PULSE_HEADER = "t_ns," + ",".join(f"delta_{q}_GHz" for q in QUBIT_NAMES)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_pulse_csv(path, times: np.ndarray, samples: np.ndarray):
    """Waveform rows: start time of each interval plus one column per qubit."""
    samples = np.atleast_2d(samples)
    if samples.shape[0] != len(QUBIT_NAMES):
        raise GridMismatchError(
            f"pulse CSV needs {len(QUBIT_NAMES)} control rows, got {samples.shape[0]}"
        )
    if samples.shape[1] != len(times):
        raise GridMismatchError(
            f"{len(times)} times vs {samples.shape[1]} samples per control"
        )
    lines = [PULSE_HEADER]
    for m, t in enumerate(times):
        lines.append(",".join([_fmt(t)] + [_fmt(samples[i, m]) for i in range(samples.shape[0])]))
    Path(path).write_text("\n".join(lines) + "\n")


def read_pulse_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Returns (times, samples) with samples shaped (n_controls, n_rows)."""
    lines = Path(path).read_text().strip().splitlines()
    if not lines or lines[0].strip() != PULSE_HEADER:
        raise GridMismatchError(
            f"unexpected pulse CSV header {lines[0]!r}" if lines else "empty pulse CSV"
        )
    rows = [list(map(float, ln.split(","))) for ln in lines[1:]]
    data = np.asarray(rows, float)
    return data[:, 0], data[:, 1:].T


def coarse_pulse_rows(pulse: CoarsePulse, spec: ScheduleSpec) -> tuple[np.ndarray, np.ndarray]:
    return spec.coarse_times, pulse.full_samples(spec)


def fine_pulse_rows(fine: FinePulse, spec: ScheduleSpec) -> tuple[np.ndarray, np.ndarray]:
    return spec.fine_times, fine.samples


def pulse_from_csv(path, spec: ScheduleSpec) -> FinePulse:
    """Load a pulse CSV as a fine-grid waveform.

    Accepts either grid: a fine-resolution file is used as-is, a coarse
    file is re-expanded through the hold-and-filter pipeline (idle values
    taken from the buffer rows).
    """
    times, samples = read_pulse_csv(path)
    n_rows = len(times)
    if n_rows == spec.n_fine:
        return FinePulse(samples=samples, idle=samples[:, 0].copy())
    if n_rows == spec.n_coarse:
        idle = samples[:, 0].copy()
        n_buf = spec.n_buffer
        active = samples[:, n_buf : n_buf + spec.n_active]
        coarse = CoarsePulse(samples=active, idle=idle)
        return shaped_pulse(coarse, spec)
    raise GridMismatchError(
        f"pulse CSV has {n_rows} rows; schedule expects {spec.n_fine} (fine) "
        f"or {spec.n_coarse} (coarse)"
    )


def trajectory_column(label: str) -> str:
    if label in ("leak", "other"):
        return f"p_{label}"
    return "p_" + label.replace("|", "_")


def write_trajectory_csv(path, traj: Trajectory):
    names = [trajectory_column(lbl) for lbl in traj.populations]
    lines = ["t_ns," + ",".join(names)]
    series = list(traj.populations.values())
    for m, t in enumerate(traj.times):
        lines.append(",".join([_fmt(t)] + [_fmt(s[m]) for s in series]))
    Path(path).write_text("\n".join(lines) + "\n")


def read_trajectory_csv(path) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    lines = Path(path).read_text().strip().splitlines()
    header = lines[0].split(",")
    data = np.asarray([list(map(float, ln.split(","))) for ln in lines[1:]], float)
    return data[:, 0], {name: data[:, 1 + j] for j, name in enumerate(header[1:])}


SWEEP_HEADER = "t_g_ns,best_fidelity,restarts_used,iterations_total,warm_started"


def write_sweep_csv(path, points):
    lines = [SWEEP_HEADER]
    for p in points:
        lines.append(
            ",".join(
                [
                    _fmt(p.gate_time),
                    _fmt(p.best_fidelity),
                    str(p.restarts_used),
                    str(p.iterations),
                    str(int(p.warm_started)),
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n")


TRACE_HEADER = "restart,iteration,fidelity,step_size,grad_norm"


def write_trace_csv(path, trace: list[IterationRecord]):
    lines = [TRACE_HEADER]
    for rec in trace:
        lines.append(
            f"{rec.restart},{rec.iteration},{_fmt(rec.fidelity)},"
            f"{_fmt(rec.step_size)},{_fmt(rec.grad_norm)}"
        )
    Path(path).write_text("\n".join(lines) + "\n")


def result_json_payload(
    result: OptimizeResult, gate_time: float, problem: str, seed: int
) -> dict:
    return {
        "schema": RESULT_SCHEMA,
        "problem": problem,
        "gate_time_ns": gate_time,
        "seed": seed,
        "fidelity": result.best_fidelity,
        "infidelity": 1.0 - result.best_fidelity,
        "target_fidelity": result.target_fidelity,
        "reached_target": result.reached_target,
        "termination": result.termination,
        "iterations": result.iterations,
        "restarts_used": result.restarts_used,
        "best_restart": result.restart_index,
        "wall_time_s": result.wall_time,
    }


def write_result_json(path, payload: dict):
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")
