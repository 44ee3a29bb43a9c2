"""Tests for the sweep driver, baseline problem and entangler check."""

import numpy as np
import pytest

from zpulse.device import canonical_params, target_ifredkin
from zpulse.errors import InvalidParameterError
from zpulse.experiments import (
    entangler_check,
    resample_active,
    speed_limit_sweep,
)
from zpulse.operators import SubsystemDims, computational_isometry
from zpulse.optimize import OptimizerOptions, optimize
from zpulse.problem import iswap_baseline
from zpulse.schedule import ScheduleSpec

DIMS = SubsystemDims()


class TestBaselineProblem:
    def test_two_active_controls(self):
        prob = iswap_baseline(canonical_params())
        assert prob.active_controls == (1, 2)

    def test_parking_detuning(self):
        prob = iswap_baseline(canonical_params())
        assert prob.idle[0] == pytest.approx(3.5)  # 10 - 6.5 GHz

    def test_four_dim_target(self):
        prob = iswap_baseline(canonical_params())
        assert prob.target.dim == 4
        assert prob.target.qubits == (1, 2)

    def test_same_hilbert_space(self):
        prob = iswap_baseline(canonical_params())
        assert prob.device.dims.total == 81


class TestEntanglerCheck:
    def test_exact_gate_maps_to_ghz(self):
        q = computational_isometry(DIMS)
        u_f = target_ifredkin(+1).matrix
        u = np.eye(DIMS.total, dtype=complex) + q @ (u_f - np.eye(8)) @ q.conj().T
        assert entangler_check(u, DIMS) == pytest.approx(1.0, abs=1e-12)

    def test_identity_gives_quarter(self):
        assert entangler_check(np.eye(DIMS.total), DIMS) == pytest.approx(0.25, abs=1e-12)

    def test_global_phase_free(self):
        q = computational_isometry(DIMS)
        u_f = target_ifredkin(+1).matrix
        u = np.eye(DIMS.total, dtype=complex) + q @ (u_f - np.eye(8)) @ q.conj().T
        assert entangler_check(np.exp(0.9j) * u, DIMS) == pytest.approx(1.0, abs=1e-12)


class TestResample:
    def test_identity_when_same_length(self):
        x = np.arange(12.0).reshape(2, 6)
        assert np.array_equal(resample_active(x, 6), x)

    def test_idle_padding_embeds_pulse(self):
        x = np.arange(8.0).reshape(2, 4)
        y = resample_active(x, 7, idle=np.array([9.0, -1.0]))
        assert np.array_equal(y[:, :4], x)
        assert np.allclose(y[0, 4:], 9.0)
        assert np.allclose(y[1, 4:], -1.0)

    def test_stretch_without_idle(self):
        x = np.linspace(0.0, 1.0, 8)[None, :]
        y = resample_active(x, 16)
        assert y.shape == (1, 16)
        assert np.all(np.diff(y[0]) >= -1e-12)


class TestSweep:
    def test_single_point_equals_direct_optimize(self):
        prob = iswap_baseline(schedule=ScheduleSpec(gate_time=30.0))
        opts = OptimizerOptions(seed=11, restarts=1, max_iterations=60, target_fidelity=0.95)
        sweep = speed_limit_sweep(prob, [30.0], opts)
        direct = optimize(prob, opts)
        assert len(sweep.points) == 1
        assert sweep.points[0].best_fidelity == pytest.approx(direct.best_fidelity, abs=0)
        assert sweep.points[0].warm_started is False

    def test_rejects_unsorted_times(self):
        prob = iswap_baseline(schedule=ScheduleSpec(gate_time=30.0))
        with pytest.raises(InvalidParameterError):
            speed_limit_sweep(prob, [30.0, 28.0], OptimizerOptions())

    def test_rejects_empty(self):
        prob = iswap_baseline(schedule=ScheduleSpec(gate_time=30.0))
        with pytest.raises(InvalidParameterError):
            speed_limit_sweep(prob, [], OptimizerOptions())

    def test_warm_start_improves_over_sweep(self):
        # short iteration budget: warm-started points must keep climbing
        prob = iswap_baseline(schedule=ScheduleSpec(gate_time=24.0))
        opts = OptimizerOptions(seed=12, restarts=1, max_iterations=40, target_fidelity=1.0)
        sweep = speed_limit_sweep(prob, [24.0, 26.0, 28.0], opts, warm_start=True)
        phis = [p.best_fidelity for p in sweep.points]
        assert sweep.points[1].warm_started and sweep.points[2].warm_started
        assert phis[1] >= phis[0] - 1e-6
        assert phis[2] >= phis[1] - 1e-6

    def test_minimal_feasible_and_stop(self):
        prob = iswap_baseline(schedule=ScheduleSpec(gate_time=30.0))
        opts = OptimizerOptions(seed=13, restarts=1, max_iterations=200, target_fidelity=0.99)
        sweep = speed_limit_sweep(
            prob, [30.0, 32.0, 34.0], opts, warm_start=True, stop_after_feasible=0
        )
        assert sweep.minimal_feasible == 30.0
        assert len(sweep.points) == 1

    def test_sweep_deterministic(self):
        prob = iswap_baseline(schedule=ScheduleSpec(gate_time=24.0))
        opts = OptimizerOptions(seed=14, restarts=1, max_iterations=20, target_fidelity=1.0)
        s1 = speed_limit_sweep(prob, [24.0, 26.0], opts)
        s2 = speed_limit_sweep(prob, [24.0, 26.0], opts)
        assert [(p.gate_time, p.best_fidelity, p.iterations) for p in s1.points] == [
            (p.gate_time, p.best_fidelity, p.iterations) for p in s2.points
        ]
