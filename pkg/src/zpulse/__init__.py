"""Optimal-control synthesis of entangling gates on a bus-coupled circuit.

Core pipeline: build the rotating-frame device model, shape piecewise
constant detuning pulses through a Gaussian filter, propagate the
Schroedinger equation step by step, score the leakage-projected gate
fidelity, and climb it with a multi-start quasi-Newton ascent.
"""

__version__ = "0.1.0"

from .device import (
    ControlledHamiltonian,
    DeviceParams,
    TargetGate,
    build_hamiltonian,
    canonical_params,
    target_ifredkin,
    target_iswap,
)
from .errors import (
    ConfigError,
    GridMismatchError,
    InvalidDimensionError,
    InvalidLabelError,
    InvalidOperatorError,
    InvalidParameterError,
    ZPulseError,
)
from .experiments import (
    SweepPoint,
    SweepResult,
    entangler_check,
    iswap_baseline,
    speed_limit_sweep,
)
from .objective import FidelityResult, fidelity_and_gradient, projected_fidelity, pulse_fidelity
from .operators import (
    SubsystemDims,
    annihilation_op,
    basis_index,
    basis_label,
    basis_state,
    computational_isometry,
    computational_projector,
    computational_states,
    embed,
)
from .optimize import (
    IterationRecord,
    OptimizeResult,
    OptimizerOptions,
    check_gradient,
    optimize,
)
from .problem import ControlProblem, ifredkin_problem, make_problem
from .propagation import Propagation, Trajectory, step_propagator, total_propagator, trajectory
from .schedule import (
    CoarsePulse,
    FilterOperator,
    FinePulse,
    ScheduleSpec,
    filter_matrix,
    gaussian_filter,
    idle_pulse,
    shaped_pulse,
    zero_order_hold,
)

__all__ = [
    "__version__",
    "ControlledHamiltonian",
    "DeviceParams",
    "TargetGate",
    "build_hamiltonian",
    "canonical_params",
    "target_ifredkin",
    "target_iswap",
    "ConfigError",
    "GridMismatchError",
    "InvalidDimensionError",
    "InvalidLabelError",
    "InvalidOperatorError",
    "InvalidParameterError",
    "ZPulseError",
    "SweepPoint",
    "SweepResult",
    "entangler_check",
    "iswap_baseline",
    "speed_limit_sweep",
    "FidelityResult",
    "fidelity_and_gradient",
    "projected_fidelity",
    "pulse_fidelity",
    "SubsystemDims",
    "annihilation_op",
    "basis_index",
    "basis_label",
    "basis_state",
    "computational_isometry",
    "computational_projector",
    "computational_states",
    "embed",
    "IterationRecord",
    "OptimizeResult",
    "OptimizerOptions",
    "check_gradient",
    "optimize",
    "ControlProblem",
    "ifredkin_problem",
    "make_problem",
    "Propagation",
    "Trajectory",
    "step_propagator",
    "total_propagator",
    "trajectory",
    "CoarsePulse",
    "FilterOperator",
    "FinePulse",
    "ScheduleSpec",
    "filter_matrix",
    "gaussian_filter",
    "idle_pulse",
    "shaped_pulse",
    "zero_order_hold",
]
