"""Tests for device parameters, Hamiltonian construction and target gates."""

import numpy as np
import pytest

from zpulse.device import (
    DeviceParams,
    TWO_PI,
    build_hamiltonian,
    canonical_params,
    target_ifredkin,
    target_iswap,
)
from zpulse.errors import InvalidParameterError
from zpulse.operators import SubsystemDims, basis_index

DIMS = SubsystemDims()


class TestCanonicalParams:
    def test_coupling_anharmonicity_ratio(self):
        p = canonical_params()
        for g, a in zip(p.couplings, p.anharmonicities):
            assert g / a == pytest.approx(-0.15)

    def test_strongest_coupling(self):
        assert canonical_params().couplings[2] == pytest.approx(0.060)

    def test_idle_detunings(self):
        assert canonical_params().idle_detunings == pytest.approx((1.0, 1.5, 2.0))

    def test_rotating_frame_at_bus(self):
        assert canonical_params().rot_freq == pytest.approx(6.5)

    def test_rejects_positive_anharmonicity(self):
        with pytest.raises(InvalidParameterError):
            DeviceParams(anharmonicities=(0.2, -0.3, -0.4))

    def test_rejects_zero_coupling(self):
        with pytest.raises(InvalidParameterError):
            DeviceParams(couplings=(0.0, 0.045, 0.060))


class TestBuildHamiltonian:
    def test_hermitian(self):
        ham = build_hamiltonian(canonical_params())
        assert np.max(np.abs(ham.drift - ham.drift.conj().T)) < 1e-14
        for op in ham.control_ops:
            assert np.max(np.abs(op - op.conj().T)) < 1e-14

    def test_controls_are_diagonal(self):
        ham = build_hamiltonian(canonical_params())
        for op in ham.control_ops:
            assert np.max(np.abs(op - np.diag(np.diag(op)))) == 0.0

    def test_linear_in_controls(self):
        ham = build_hamiltonian(canonical_params())
        base = np.array([0.3, -0.2, 1.1])
        for i in range(3):
            eps = np.zeros(3)
            eps[i] = 0.7
            diff = ham.at(base + eps) - ham.at(base)
            assert np.max(np.abs(diff - 0.7 * ham.control_ops[i])) < 1e-12

    def test_double_excitation_energy_is_anharmonicity(self):
        # with couplings off and zero detunings, level 2 of qubit P sits at
        # Delta_P in cyclic units: -Delta/2 * 2 + Delta/2 * 4 = Delta
        params = DeviceParams(couplings=(1e-12, 1e-12, 1e-12))
        ham = build_hamiltonian(params)
        h = ham.at([0.0, 0.0, 0.0])
        idx = basis_index("0|200", DIMS)
        assert h[idx, idx].real == pytest.approx(TWO_PI * params.anharmonicities[0], rel=1e-9)

    def test_bus_undriven_and_dark_in_rotating_frame(self):
        ham = build_hamiltonian(canonical_params())
        assert len(ham.control_ops) == 3
        idx = basis_index("1|000", DIMS)
        assert abs(ham.drift[idx, idx]) < 1e-12  # bus quanta carry no frame energy

    def test_zero_coupling_spectrum(self):
        # eigenvalues are sums of single-subsystem level energies {0, d, 2d + Delta}
        params = DeviceParams(couplings=(1e-13, 1e-13, 1e-13))
        ham = build_hamiltonian(params)
        detunings = np.array([0.9, 1.4, 2.2])
        h = ham.at(detunings)
        eig = np.sort(np.linalg.eigvalsh(h))
        levels = []
        for d, a in zip(detunings, params.anharmonicities):
            levels.append(np.array([0.0, d, 2 * d + a]) * TWO_PI)
        expected = []
        for p in range(3):
            for q in range(3):
                for r in range(3):
                    expected.append(levels[0][p] + levels[1][q] + levels[2][r])
        expected = np.sort(np.concatenate([np.asarray(expected)] * 3))  # 3 bus levels
        assert np.allclose(eig, expected, atol=1e-8)


class TestTargets:
    def test_ifredkin_swaps_101_110(self):
        u = target_ifredkin(+1).matrix
        psi = np.zeros(8, dtype=complex)
        psi[5] = 1.0  # |101>
        out = u @ psi
        expected = np.zeros(8, dtype=complex)
        expected[6] = 1j  # i|110>
        assert np.allclose(out, expected)

    def test_ifredkin_identity_on_control_zero(self):
        u = target_ifredkin(+1).matrix
        psi = np.zeros(8, dtype=complex)
        psi[3] = 1.0  # |011>
        assert np.allclose(u @ psi, psi)

    def test_ifredkin_makes_ghz(self):
        u = target_ifredkin(+1).matrix
        psi = np.zeros(8, dtype=complex)
        psi[1] = psi[5] = 1.0 / np.sqrt(2.0)  # (|001> + |101>)/sqrt2
        out = u @ psi
        expected = np.zeros(8, dtype=complex)
        expected[1] = 1.0 / np.sqrt(2.0)
        expected[6] = 1j / np.sqrt(2.0)
        assert np.allclose(out, expected)

    def test_ifredkin_minus_sign(self):
        u = target_ifredkin(-1).matrix
        assert u[5, 6] == -1j and u[6, 5] == -1j

    def test_both_targets_unitary(self):
        for t in (target_ifredkin(+1), target_ifredkin(-1), target_iswap()):
            u = t.matrix
            assert np.max(np.abs(u.conj().T @ u - np.eye(t.dim))) < 1e-12

    def test_iswap_action(self):
        u = target_iswap().matrix
        psi = np.zeros(4, dtype=complex)
        psi[1] = 1.0  # |01>
        out = u @ psi
        assert out[2] == pytest.approx(1j)
        psi00 = np.zeros(4, dtype=complex)
        psi00[0] = 1.0
        assert np.allclose(u @ psi00, psi00)

    def test_iswap_fourth_power_is_identity(self):
        u = target_iswap().matrix
        assert np.allclose(np.linalg.matrix_power(u, 4), np.eye(4))
