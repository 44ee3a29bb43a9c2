"""HTTP service wrapping the synthesis library.

Endpoints mirror the CLI subcommands: optimize, trajectory, sweep,
checkgrad, plus target inspection and a health probe.  Requests carry
optional device/schedule/optimizer overrides; defaults reproduce the
reference experiment.  Numeric payloads are plain JSON floats (binary64
round-trips exactly), so clients can serialize artifacts bit-identically.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from . import __version__
from .device import DeviceParams
from .errors import ZPulseError
from .experiments import speed_limit_sweep
from .operators import SubsystemDims
from .optimize import OptimizerOptions, check_gradient, optimize
from .problem import DEFAULT_BOUNDS, PROBLEM_NAMES, make_problem
from .propagation import trajectory as run_trajectory
from .schedule import CoarsePulse, FinePulse, ScheduleSpec, shaped_pulse


class DeviceModel(BaseModel):
    bus_freq_ghz: float = 6.5
    qubit_freqs_ghz: list[float] = [7.5, 8.0, 8.5]
    anharmonicities_ghz: list[float] = [-0.2, -0.3, -0.4]
    couplings_ghz: list[float] = [0.03, 0.045, 0.06]
    levels: list[int] = [3, 3, 3, 3]

    def to_params(self) -> DeviceParams:
        return DeviceParams(
            bus_freq=self.bus_freq_ghz,
            qubit_freqs=tuple(self.qubit_freqs_ghz),
            anharmonicities=tuple(self.anharmonicities_ghz),
            couplings=tuple(self.couplings_ghz),
            dims=SubsystemDims(tuple(self.levels)),
        )


class ScheduleModel(BaseModel):
    gate_time_ns: float = 56.0
    coarse_dt_ns: float = 1.0
    fine_dt_ns: float = 0.1
    buffer_ns: float = 4.0
    filter_sigma_ns: float = 0.4

    def to_spec(self) -> ScheduleSpec:
        return ScheduleSpec(
            gate_time=self.gate_time_ns,
            coarse_dt=self.coarse_dt_ns,
            fine_dt=self.fine_dt_ns,
            buffer=self.buffer_ns,
            filter_sigma=self.filter_sigma_ns,
        )


class OptimizerModel(BaseModel):
    target_fidelity: float = 0.9999
    max_iterations: int = 2000
    restarts: int = 20
    init_scale_ghz: float = 0.3
    init_anchor: str = "resonance"
    grad_tol: float = 1e-9
    stall_window: int = 0
    stall_tol: float = 1e-6
    box_min_ghz: float = DEFAULT_BOUNDS[0]
    box_max_ghz: float = DEFAULT_BOUNDS[1]

    def to_options(self, seed: int) -> OptimizerOptions:
        return OptimizerOptions(
            target_fidelity=self.target_fidelity,
            max_iterations=self.max_iterations,
            restarts=self.restarts,
            init_scale=self.init_scale_ghz,
            init_anchor=self.init_anchor,
            grad_tol=self.grad_tol,
            stall_window=self.stall_window,
            stall_tol=self.stall_tol,
            seed=seed,
        )


class PulseModel(BaseModel):
    """Waveform rows matching the pulse CSV schema (times plus 3 columns)."""

    t_ns: list[float]
    delta_P_GHz: list[float]
    delta_S1_GHz: list[float]
    delta_S2_GHz: list[float]

    @classmethod
    def from_arrays(cls, times: np.ndarray, samples: np.ndarray) -> "PulseModel":
        return cls(
            t_ns=times.tolist(),
            delta_P_GHz=samples[0].tolist(),
            delta_S1_GHz=samples[1].tolist(),
            delta_S2_GHz=samples[2].tolist(),
        )

    def to_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        samples = np.asarray(
            [self.delta_P_GHz, self.delta_S1_GHz, self.delta_S2_GHz], float
        )
        return np.asarray(self.t_ns, float), samples


class TraceRow(BaseModel):
    restart: int
    iteration: int
    fidelity: float
    step_size: float
    grad_norm: float


class OptimizeRequest(BaseModel):
    device: DeviceModel = Field(default_factory=DeviceModel)
    schedule: ScheduleModel = Field(default_factory=ScheduleModel)
    optimizer: OptimizerModel = Field(default_factory=OptimizerModel)
    problem: str = "ifredkin+"
    seed: int = 1234


class OptimizeResponse(BaseModel):
    schema_version: int = 1
    problem: str
    gate_time_ns: float
    seed: int
    fidelity: float
    infidelity: float
    target_fidelity: float
    reached_target: bool
    termination: str
    iterations: int
    restarts_used: int
    best_restart: int
    wall_time_s: float
    coarse: PulseModel
    fine: PulseModel
    trace: list[TraceRow]


class TrajectoryRequest(BaseModel):
    device: DeviceModel = Field(default_factory=DeviceModel)
    schedule: ScheduleModel = Field(default_factory=ScheduleModel)
    pulse: PulseModel
    initial: str = "0|110"
    watch: list[str] = ["0|110", "0|101", "1|100"]


class TrajectoryResponse(BaseModel):
    t_ns: list[float]
    columns: dict[str, list[float]]


class SweepRequest(BaseModel):
    device: DeviceModel = Field(default_factory=DeviceModel)
    schedule: ScheduleModel = Field(default_factory=ScheduleModel)
    optimizer: OptimizerModel = Field(default_factory=OptimizerModel)
    problem: str = "ifredkin+"
    seed: int = 1234
    t_min_ns: float = 40.0
    t_max_ns: float = 70.0
    t_step_ns: float = 1.0
    warm_start: bool = True
    stop_after_feasible: int | None = None


class SweepRow(BaseModel):
    t_g_ns: float
    best_fidelity: float
    restarts_used: int
    iterations_total: int
    warm_started: bool


class SweepResponse(BaseModel):
    problem: str
    target_fidelity: float
    minimal_feasible_ns: float | None
    rows: list[SweepRow]


class CheckGradRequest(BaseModel):
    device: DeviceModel = Field(default_factory=DeviceModel)
    schedule: ScheduleModel = Field(default_factory=ScheduleModel)
    problem: str = "ifredkin+"
    seed: int = 1234
    probes: int = 100
    fd_step: float = 1e-6
    pulse_scale_ghz: float = 0.3
    corrupt_adjoint: bool = False


class CheckGradResponse(BaseModel):
    max_rel_error: float
    probes: int
    fd_step: float


class TargetResponse(BaseModel):
    name: str
    dim: int
    qubits: list[int]
    matrix_real: list[list[float]]
    matrix_imag: list[list[float]]


app = FastAPI(title="zpulse", version=__version__)


def _problem_or_422(name, device, schedule, bounds=DEFAULT_BOUNDS):
    try:
        return make_problem(name, device, schedule, bounds)
    except ZPulseError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.get("/health")
def health():
    return {"status": "ok", "version": __version__}


@app.get("/target/{problem_name}", response_model=TargetResponse)
def target(problem_name: str):
    if problem_name not in PROBLEM_NAMES:
        raise HTTPException(
            status_code=422,
            detail=f"unknown problem {problem_name!r}; expected one of {PROBLEM_NAMES}",
        )
    prob = _problem_or_422(problem_name, None, None)
    m = prob.target.matrix
    return TargetResponse(
        name=prob.target.name,
        dim=prob.target.dim,
        qubits=list(prob.target.qubits),
        matrix_real=m.real.tolist(),
        matrix_imag=m.imag.tolist(),
    )


@app.post("/optimize", response_model=OptimizeResponse)
def optimize_endpoint(req: OptimizeRequest):
    try:
        device = req.device.to_params()
        schedule = req.schedule.to_spec()
        opts = req.optimizer.to_options(req.seed)
        bounds = (req.optimizer.box_min_ghz, req.optimizer.box_max_ghz)
        prob = make_problem(req.problem, device, schedule, bounds)
        result = optimize(prob, opts)
    except ZPulseError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc

    fine = shaped_pulse(result.best_pulse, schedule)
    return OptimizeResponse(
        problem=req.problem,
        gate_time_ns=schedule.gate_time,
        seed=req.seed,
        fidelity=result.best_fidelity,
        infidelity=1.0 - result.best_fidelity,
        target_fidelity=result.target_fidelity,
        reached_target=result.reached_target,
        termination=result.termination,
        iterations=result.iterations,
        restarts_used=result.restarts_used,
        best_restart=result.restart_index,
        wall_time_s=result.wall_time,
        coarse=PulseModel.from_arrays(
            schedule.coarse_times, result.best_pulse.full_samples(schedule)
        ),
        fine=PulseModel.from_arrays(schedule.fine_times, fine.samples),
        trace=[
            TraceRow(
                restart=r.restart,
                iteration=r.iteration,
                fidelity=r.fidelity,
                step_size=r.step_size,
                grad_norm=r.grad_norm,
            )
            for r in result.trace
        ],
    )


@app.post("/trajectory", response_model=TrajectoryResponse)
def trajectory_endpoint(req: TrajectoryRequest):
    try:
        device = req.device.to_params()
        schedule = req.schedule.to_spec()
        times, samples = req.pulse.to_arrays()
        if len(times) == schedule.n_fine:
            fine = FinePulse(samples=samples, idle=samples[:, 0].copy())
        elif len(times) == schedule.n_coarse:
            n_buf = schedule.n_buffer
            coarse = CoarsePulse(
                samples=samples[:, n_buf : n_buf + schedule.n_active],
                idle=samples[:, 0].copy(),
            )
            fine = shaped_pulse(coarse, schedule)
        else:
            raise HTTPException(
                status_code=422,
                detail=(
                    f"pulse has {len(times)} rows; schedule expects "
                    f"{schedule.n_fine} (fine) or {schedule.n_coarse} (coarse)"
                ),
            )
        from .device import build_hamiltonian

        ham = build_hamiltonian(device)
        traj = run_trajectory(ham, fine, schedule, req.initial, watch=req.watch)
    except ZPulseError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return TrajectoryResponse(
        t_ns=traj.times.tolist(),
        columns={k: v.tolist() for k, v in traj.populations.items()},
    )


@app.post("/sweep", response_model=SweepResponse)
def sweep_endpoint(req: SweepRequest):
    if req.t_step_ns <= 0 or req.t_max_ns < req.t_min_ns:
        raise HTTPException(status_code=422, detail="empty or invalid gate-time range")
    gate_times = []
    t = req.t_min_ns
    while t <= req.t_max_ns + 1e-9:
        gate_times.append(round(t, 9))
        t += req.t_step_ns
    try:
        device = req.device.to_params()
        schedule = req.schedule.to_spec()
        opts = req.optimizer.to_options(req.seed)
        bounds = (req.optimizer.box_min_ghz, req.optimizer.box_max_ghz)
        template = make_problem(req.problem, device, schedule, bounds)
        sweep = speed_limit_sweep(
            template,
            gate_times,
            opts,
            warm_start=req.warm_start,
            stop_after_feasible=req.stop_after_feasible,
        )
    except ZPulseError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return SweepResponse(
        problem=req.problem,
        target_fidelity=sweep.target_fidelity,
        minimal_feasible_ns=sweep.minimal_feasible,
        rows=[
            SweepRow(
                t_g_ns=p.gate_time,
                best_fidelity=p.best_fidelity,
                restarts_used=p.restarts_used,
                iterations_total=p.iterations,
                warm_started=p.warm_started,
            )
            for p in sweep.points
        ],
    )


@app.post("/checkgrad", response_model=CheckGradResponse)
def checkgrad_endpoint(req: CheckGradRequest):
    try:
        device = req.device.to_params()
        schedule = req.schedule.to_spec()
        prob = make_problem(req.problem, device, schedule)
        rng = np.random.default_rng(req.seed)
        active = list(prob.active_controls)
        samples = np.repeat(np.asarray(prob.idle)[:, None], schedule.n_active, axis=1)
        samples[active] += req.pulse_scale_ghz * rng.standard_normal(
            (len(active), schedule.n_active)
        )
        pulse = CoarsePulse(samples=samples, idle=np.asarray(prob.idle))
        err = check_gradient(
            prob,
            pulse,
            n_probes=req.probes,
            fd_step=req.fd_step,
            seed=req.seed,
            corrupt_adjoint=req.corrupt_adjoint,
        )
    except ZPulseError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    return CheckGradResponse(max_rel_error=err, probes=req.probes, fd_step=req.fd_step)
