"""Tests for pulse schedules, the Gaussian filter and its linear operator."""

import math

import numpy as np
import pytest

from zpulse.errors import GridMismatchError, InvalidParameterError
from zpulse.schedule import (
    CoarsePulse,
    FinePulse,
    ScheduleSpec,
    filter_matrix,
    gaussian_filter,
    gaussian_kernel,
    idle_pulse,
    shaped_pulse,
    zero_order_hold,
)

SPEC = ScheduleSpec(gate_time=56.0)
IDLE = np.array([1.0, 1.5, 2.0])


class TestScheduleSpec:
    def test_default_counts(self):
        assert SPEC.n_fine == 560
        assert SPEC.n_coarse == 56
        assert SPEC.n_active == 48
        assert SPEC.hold_ratio == 10

    def test_rejects_gate_time_inside_buffers(self):
        with pytest.raises(InvalidParameterError):
            ScheduleSpec(gate_time=8.0)

    def test_rejects_non_multiple_fine_dt(self):
        with pytest.raises(InvalidParameterError):
            ScheduleSpec(gate_time=56.0, fine_dt=0.3)

    def test_rejects_non_multiple_gate_time(self):
        with pytest.raises(InvalidParameterError):
            ScheduleSpec(gate_time=56.5)

    def test_rejects_negative_sigma(self):
        with pytest.raises(InvalidParameterError):
            ScheduleSpec(gate_time=56.0, filter_sigma=0.0)


class TestZeroOrderHold:
    def test_constant_pulse_holds(self):
        pulse = idle_pulse(SPEC, IDLE)
        fine = zero_order_hold(pulse, SPEC)
        assert fine.samples.shape == (3, 560)
        for i in range(3):
            assert np.allclose(fine.samples[i], IDLE[i])

    def test_two_sample_expansion(self):
        spec = ScheduleSpec(gate_time=10.0, buffer=4.0)
        pulse = CoarsePulse(samples=np.array([[2.0, 3.0]]), idle=np.array([0.0]))
        fine = zero_order_hold(pulse, spec)
        active = fine.samples[0, 40:60]
        assert np.allclose(active[:10], 2.0)
        assert np.allclose(active[10:], 3.0)
        assert np.allclose(fine.samples[0, :40], 0.0)

    def test_grid_mismatch(self):
        pulse = CoarsePulse(samples=np.zeros((1, 7)), idle=np.array([0.0]))
        with pytest.raises(GridMismatchError):
            zero_order_hold(pulse, SPEC)


class TestGaussianFilter:
    def test_unit_dc_gain_on_constant(self):
        fine = FinePulse(samples=np.full((1, 560), 0.7), idle=np.array([0.7]))
        out = gaussian_filter(fine, SPEC)
        assert np.allclose(out.samples, 0.7, atol=1e-12)

    def test_impulse_peak_height(self):
        samples = np.zeros((1, 560))
        samples[0, 280] = 1.0
        out = gaussian_filter(FinePulse(samples=samples, idle=np.array([0.0])), SPEC)
        # normalized Gaussian kernel at zero offset
        expected = SPEC.fine_dt / (SPEC.filter_sigma * math.sqrt(2.0 * math.pi))
        assert out.samples[0, 280] == pytest.approx(expected, rel=2e-3)
        assert out.samples[0].max() == out.samples[0, 280]

    def test_step_rise_time(self):
        # 10-90% rise of a smoothed step: sigma * (z_0.9 - z_0.1) = 2.5631 sigma
        samples = np.zeros((1, SPEC.n_active))
        samples[0, SPEC.n_active // 2 :] = 1.0
        fine = shaped_pulse(CoarsePulse(samples=samples, idle=np.array([0.0])), SPEC)
        y = fine.samples[0]
        t = SPEC.fine_times

        def crossing(level):
            k = np.argmax(y >= level)
            frac = (level - y[k - 1]) / (y[k] - y[k - 1])
            return t[k - 1] + frac * SPEC.fine_dt

        rise = crossing(0.9) - crossing(0.1)
        assert rise == pytest.approx(2.5631 * SPEC.filter_sigma, abs=0.02)

    def test_kernel_normalized_and_truncated(self):
        k = gaussian_kernel(SPEC)
        assert len(k) == 41  # +/- 5 sigma at 0.1 ns
        assert k.sum() == pytest.approx(1.0, abs=1e-15)

    def test_buffer_pinning(self):
        rng = np.random.default_rng(3)
        pulse = CoarsePulse(samples=rng.uniform(-0.5, 3.5, (3, 48)), idle=IDLE)
        fine = shaped_pulse(pulse, SPEC)
        assert np.max(np.abs(fine.samples[:, 0] - IDLE)) < 1e-9
        assert np.max(np.abs(fine.samples[:, -1] - IDLE)) < 1e-9

    def test_shift_equivariance_away_from_edges(self):
        rng = np.random.default_rng(4)
        base = rng.normal(size=24)
        u1 = np.zeros((1, 48))
        u2 = np.zeros((1, 48))
        u1[0, 8 : 8 + 24] = base
        u2[0, 9 : 9 + 24] = base
        f1 = shaped_pulse(CoarsePulse(samples=u1, idle=np.zeros(1)), SPEC).samples[0]
        f2 = shaped_pulse(CoarsePulse(samples=u2, idle=np.zeros(1)), SPEC).samples[0]
        r = SPEC.hold_ratio
        assert np.allclose(f1[100:400], f2[100 + r : 400 + r], atol=1e-12)


class TestFilterMatrix:
    def test_constant_idle_reproduced(self):
        op = filter_matrix(SPEC)
        fine = op.apply(idle_pulse(SPEC, IDLE))
        for i in range(3):
            assert np.allclose(fine.samples[i], IDLE[i], atol=1e-12)

    def test_matches_filter_pipeline(self):
        rng = np.random.default_rng(5)
        pulse = CoarsePulse(samples=rng.uniform(-0.5, 3.5, (3, 48)), idle=IDLE)
        op = filter_matrix(SPEC)
        direct = shaped_pulse(pulse, SPEC)
        via_op = op.apply(pulse)
        assert np.max(np.abs(direct.samples - via_op.samples)) < 1e-12

    def test_columns_match_finite_differences(self):
        op = filter_matrix(SPEC)
        rng = np.random.default_rng(6)
        base = CoarsePulse(samples=rng.normal(size=(1, 48)), idle=np.array([0.3]))
        f0 = shaped_pulse(base, SPEC).samples[0]
        eps = 1e-6
        for k in (0, 17, 47):
            bumped = base.samples.copy()
            bumped[0, k] += eps
            fk = shaped_pulse(CoarsePulse(samples=bumped, idle=np.array([0.3])), SPEC).samples[0]
            assert np.allclose((fk - f0) / eps, op.weights[:, k], atol=1e-8)

    def test_row_sums_at_most_one(self):
        op = filter_matrix(SPEC)
        sums = op.weights.sum(axis=1)
        assert np.all(sums <= 1.0 + 1e-12)
        assert np.all(op.idle_response >= -1e-12)

    def test_adjoint_identity(self):
        op = filter_matrix(SPEC)
        rng = np.random.default_rng(7)
        u = rng.normal(size=48)
        v = rng.normal(size=560)
        lhs = np.dot(op.weights @ u, v)
        rhs = np.dot(u, op.adjoint(v[None, :])[0])
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_linearity(self):
        op = filter_matrix(SPEC)
        rng = np.random.default_rng(8)
        u = rng.normal(size=(3, 48))
        v = rng.normal(size=(3, 48))
        zero = np.zeros(3)
        fu = op.apply(CoarsePulse(samples=u, idle=zero)).samples
        fv = op.apply(CoarsePulse(samples=v, idle=zero)).samples
        fuv = op.apply(CoarsePulse(samples=2.0 * u - 0.5 * v, idle=zero)).samples
        assert np.max(np.abs(fuv - (2.0 * fu - 0.5 * fv))) < 1e-12
