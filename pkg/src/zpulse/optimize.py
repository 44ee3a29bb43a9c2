"""Multi-start box-constrained ascent on the gate fidelity.

Each restart draws an initial pulse (idle plus Gaussian perturbations),
then climbs Phi with a limited-memory quasi-Newton direction, backtracking
line search and projection onto the box constraints.  Accepted steps are
monotone in Phi by construction.  Restarts use independent sub-seeds of
the master seed, so runs are reproducible bit for bit.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, NonFiniteObjectiveError
from .problem import ControlProblem
from .schedule import CoarsePulse


@dataclass(frozen=True)
class OptimizerOptions:
    """Ascent settings; defaults reproduce the reference experiments.

    ``init_anchor`` picks where random initial pulses are centered:
    "resonance" starts the active window at zero detuning (on the bus),
    "idle" at the idle detunings.  Resonant starts converge orders of
    magnitude faster here because far-detuned pulses barely interact and
    their fidelity landscape is nearly flat.

    ``stall_window``/``stall_tol`` optionally cut hopeless restarts: a
    restart stops once the fidelity gained over the last ``stall_window``
    accepted steps drops below ``stall_tol`` times the remaining gap to the
    target (i.e. the projected time to target exceeds window/tol
    iterations).  Sweeps use this to spend little time below the speed
    limit; the default window of 0 disables the cut.
    """

    target_fidelity: float = 0.9999
    max_iterations: int = 2000
    restarts: int = 20
    init_scale: float = 0.3  # GHz, std-dev of the initial perturbations
    init_anchor: str = "resonance"
    grad_tol: float = 1e-9  # stop when the projected gradient inf-norm drops below
    armijo_c1: float = 1e-4
    backtrack_factor: float = 0.5
    max_backtracks: int = 40
    lbfgs_memory: int = 10
    stall_window: int = 0  # iterations; 0 disables the stall cut
    stall_tol: float = 0.1  # fraction of the remaining gap that must close per window
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.target_fidelity <= 1.0:
            raise InvalidParameterError(
                f"target_fidelity must be in (0, 1], got {self.target_fidelity}"
            )
        if self.restarts < 1:
            raise InvalidParameterError("need at least one restart")
        if self.max_iterations < 0:
            raise InvalidParameterError("max_iterations must be >= 0")
        if not 0.0 < self.backtrack_factor < 1.0:
            raise InvalidParameterError("backtrack_factor must be in (0, 1)")
        if self.init_anchor not in ("resonance", "idle"):
            raise InvalidParameterError(
                f"init_anchor must be 'resonance' or 'idle', got {self.init_anchor!r}"
            )


@dataclass(frozen=True)
class IterationRecord:
    restart: int
    iteration: int
    fidelity: float
    step_size: float
    grad_norm: float


@dataclass
class OptimizeResult:
    best_pulse: CoarsePulse
    best_fidelity: float
    trace: list[IterationRecord]
    iterations: int
    restart_index: int
    termination: str
    wall_time: float
    restarts_used: int
    reached_target: bool = field(init=False)
    target_fidelity: float = 0.0

    def __post_init__(self):
        self.reached_target = self.best_fidelity >= self.target_fidelity


def _projected_grad_norm(x, grad, lo, hi):
    """Inf-norm of the ascent gradient with bound-blocked components zeroed."""
    pg = grad.copy()
    at_lo = x <= lo + 1e-15
    at_hi = x >= hi - 1e-15
    pg[at_lo] = np.maximum(pg[at_lo], 0.0)
    pg[at_hi] = np.minimum(pg[at_hi], 0.0)
    return float(np.max(np.abs(pg))) if pg.size else 0.0


def _lbfgs_direction(grad, s_list, y_list):
    """Two-loop recursion for an ascent direction on Phi."""
    q = -grad  # gradient of the minimized -Phi
    alphas = []
    rhos = [1.0 / float(np.dot(y, s)) for s, y in zip(s_list, y_list)]
    for s, y, rho in zip(reversed(s_list), reversed(y_list), list(reversed(rhos))):
        a = rho * float(np.dot(s, q))
        alphas.append(a)
        q = q - a * y
    if s_list:
        s, y = s_list[-1], y_list[-1]
        q = q * (float(np.dot(s, y)) / float(np.dot(y, y)))
    for (s, y, rho), a in zip(zip(s_list, y_list, rhos), reversed(alphas)):
        b = rho * float(np.dot(y, q))
        q = q + (a - b) * s
    return -q  # back to ascent


def _run_restart(problem, opts, x0, restart_index, trace, iteration_budget):
    """Single ascent run from x0; returns (x_best, phi_best, reason, n_iter)."""
    engine = problem.engine
    active = list(problem.active_controls)
    lo, hi = problem.bounds
    n_active = problem.schedule.n_active

    def unpack(x):
        return x.reshape(len(active), n_active)

    def eval_phi(x):
        phi, _ = engine.fidelity(problem.full_coarse(unpack(x)).samples)
        return phi

    def eval_grad(x):
        phi, _, grad_full = engine.fidelity_and_gradient(
            problem.full_coarse(unpack(x)).samples
        )
        return phi, grad_full[active].ravel()

    x = np.clip(x0.ravel().copy(), lo, hi)
    phi, grad = eval_grad(x)
    gnorm = _projected_grad_norm(x, grad, lo, hi)
    trace.append(IterationRecord(restart_index, 0, phi, 0.0, gnorm))

    if phi >= opts.target_fidelity:
        return x, phi, "target_reached", 0
    if gnorm < opts.grad_tol:
        return x, phi, "gradient_converged", 0

    s_list: list[np.ndarray] = []
    y_list: list[np.ndarray] = []
    history = [phi]
    n_iter = 0
    reason = "max_iterations"
    while n_iter < iteration_budget:
        n_iter += 1
        direction = _lbfgs_direction(grad, s_list, y_list)
        step, x_new, phi_new = _line_search(
            eval_phi, x, phi, grad, direction, lo, hi, opts
        )
        if x_new is None and s_list:
            # quasi-Newton direction failed; retry along the bare gradient
            s_list, y_list = [], []
            step, x_new, phi_new = _line_search(
                eval_phi, x, phi, grad, grad, lo, hi, opts
            )
        if x_new is None:
            reason = "stationary"
            n_iter -= 1
            break

        grad_prev = grad
        phi, grad = eval_grad(x_new)
        s = x_new - x
        y = -(grad - grad_prev)  # curvature pair for the minimized -Phi
        if float(np.dot(s, y)) > 1e-12 * np.linalg.norm(s) * max(np.linalg.norm(y), 1e-300):
            s_list.append(s)
            y_list.append(y)
            if len(s_list) > opts.lbfgs_memory:
                s_list.pop(0)
                y_list.pop(0)
        x = x_new

        gnorm = _projected_grad_norm(x, grad, lo, hi)
        trace.append(IterationRecord(restart_index, n_iter, phi, step, gnorm))
        history.append(phi)
        if phi >= opts.target_fidelity:
            reason = "target_reached"
            break
        if gnorm < opts.grad_tol:
            reason = "gradient_converged"
            break
        if opts.stall_window > 0 and n_iter >= opts.stall_window:
            gain = phi - history[n_iter - opts.stall_window]
            # hopeless when, at the current rate, closing the remaining gap
            # would take more than stall_window / stall_tol iterations
            if gain < opts.stall_tol * (opts.target_fidelity - phi):
                reason = "stalled"
                break
    return x, phi, reason, n_iter


def _line_search(eval_phi, x, phi, grad, direction, lo, hi, opts):
    """Backtracking projected line search; returns (step, x_new, phi_new)."""
    step = 1.0
    for _ in range(opts.max_backtracks):
        x_new = np.clip(x + step * direction, lo, hi)
        dx = x_new - x
        predicted = float(np.dot(grad, dx))
        if predicted <= 0.0 or not np.any(dx):
            step *= opts.backtrack_factor
            continue
        phi_new = eval_phi(x_new)
        if not np.isfinite(phi_new):
            raise NonFiniteObjectiveError(
                f"objective became non-finite during line search (step {step}, "
                f"max |sample| {np.max(np.abs(x_new)):.3g} GHz)",
                samples=x_new.copy(),
            )
        if phi_new >= phi + opts.armijo_c1 * predicted:
            return step, x_new, phi_new
        step *= opts.backtrack_factor
    return 0.0, None, phi


def optimize(
    problem: ControlProblem,
    opts: OptimizerOptions | None = None,
    initial_guesses: list[np.ndarray] | None = None,
) -> OptimizeResult:
    """Best-of-restarts fidelity ascent.

    ``initial_guesses`` (active-control sample arrays) replace the random
    initializations of the first restarts; the sweep driver uses this to
    warm-start longer gate times from shorter ones.
    """
    opts = opts if opts is not None else OptimizerOptions()
    if problem.schedule.n_active < 1:
        raise InvalidParameterError("schedule has no active samples to optimize")
    t0 = time.perf_counter()

    n_rows = len(problem.active_controls)
    n_active = problem.schedule.n_active
    if opts.init_anchor == "idle":
        anchor = np.asarray(problem.idle, float)[list(problem.active_controls)]
    else:
        anchor = np.zeros(n_rows)
    seeds = np.random.SeedSequence(opts.seed).spawn(opts.restarts)

    trace: list[IterationRecord] = []
    best = None  # (phi, restart, x)
    total_iters = 0
    termination = "max_iterations"
    restarts_used = 0
    for r in range(opts.restarts):
        if initial_guesses is not None and r < len(initial_guesses):
            x0 = np.asarray(initial_guesses[r], float).reshape(n_rows, n_active)
        else:
            rng = np.random.default_rng(seeds[r])
            x0 = anchor[:, None] + opts.init_scale * rng.standard_normal(
                (n_rows, n_active)
            )
        restarts_used = r + 1
        x, phi, reason, n_iter = _run_restart(
            problem, opts, x0, r, trace, opts.max_iterations
        )
        total_iters += n_iter
        if best is None or phi > best[0]:
            best = (phi, r, x)
            termination = reason
        if phi >= opts.target_fidelity:
            break

    phi_best, r_best, x_best = best
    result = OptimizeResult(
        best_pulse=problem.full_coarse(x_best.reshape(n_rows, n_active)),
        best_fidelity=phi_best,
        trace=trace,
        iterations=total_iters,
        restart_index=r_best,
        termination=termination,
        wall_time=time.perf_counter() - t0,
        restarts_used=restarts_used,
        target_fidelity=opts.target_fidelity,
    )
    return result


def check_gradient(
    problem: ControlProblem,
    pulse: CoarsePulse,
    n_probes: int = 100,
    fd_step: float = 1e-6,
    seed: int = 0,
    corrupt_adjoint: bool = False,
) -> float:
    """Max relative error of the analytic gradient against central differences.

    Probes ``n_probes`` random active coordinates; errors are normalized by
    the largest gradient magnitude seen among the probes so that near-zero
    components do not blow up the ratio.  ``corrupt_adjoint`` deliberately
    rescales the filter-adjoint chain (negative control for the harness).
    """
    engine = problem.engine
    _, _, grad_full = engine.fidelity_and_gradient(pulse.samples)
    if corrupt_adjoint:
        grad_full = 1.02 * grad_full

    rng = np.random.default_rng(seed)
    rows = [c for c in problem.active_controls]
    n_active = problem.schedule.n_active
    coords = [
        (rows[rng.integers(len(rows))], int(rng.integers(n_active)))
        for _ in range(n_probes)
    ]

    analytic = np.array([grad_full[c, k] for c, k in coords])
    fd = np.empty(n_probes)
    for p, (c, k) in enumerate(coords):
        plus = pulse.samples.copy()
        plus[c, k] += fd_step
        minus = pulse.samples.copy()
        minus[c, k] -= fd_step
        phi_p, _ = engine.fidelity(plus)
        phi_m, _ = engine.fidelity(minus)
        fd[p] = (phi_p - phi_m) / (2.0 * fd_step)

    scale = max(np.max(np.abs(analytic)), np.max(np.abs(fd)), 1e-300)
    return float(np.max(np.abs(fd - analytic)) / scale)
