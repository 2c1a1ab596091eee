#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Test the pulsemetro.gaussian module
"""

import logging
import math
import numpy as np
from pulsemetro.gaussian import (
    Convention,
    CovarianceMatrix,
    DomainError,
    GaussianSnapshot,
    MomentVector,
    bures_distance,
    bures_step,
    check_moments,
    fidelity,
    high_temperature_occupation,
    moments_to_covariance,
    occupation_from_temperature,
    purity,
    qfi_bures_fd,
    qfi_single_mode,
    squeezing_decomposition,
    thermal_moments,
    wigner,
    wigner_grid,
    wigner_normalization,
)
import pytest
from scipy import constants

logger = logging.getLogger(__file__)

KICKED = MomentVector(100.5, -201.0, 502.5)


def rotated(r0, alpha, m):
    """MOMENT covariance R(alpha) diag(m e^-2r0, m e^2r0) R(alpha)^T"""
    c, s = math.cos(alpha), math.sin(alpha)
    a, b = m * math.exp(-2.0 * r0), m * math.exp(2.0 * r0)
    return CovarianceMatrix(a * c * c + b * s * s, (a - b) * c * s, a * s * s + b * c * c)


def random_state(rng):
    return GaussianSnapshot(
        rotated(rng.uniform(0.0, 1.5), rng.uniform(-0.5 * math.pi, 0.5 * math.pi), 0.5 + rng.exponential())
    )


def thermal(n):
    return GaussianSnapshot(moments_to_covariance(thermal_moments(n)))


class TestThermal:
    def test_vacuum(self):
        assert thermal_moments(0.0) == MomentVector(0.5, 0.0, 0.5)

    def test_default_occupation(self):
        assert thermal_moments(100.0) == MomentVector(100.5, 0.0, 100.5)

    def test_fractional(self):
        assert thermal_moments(1.5) == MomentVector(2.0, 0.0, 2.0)

    def test_negative(self):
        with pytest.raises(DomainError):
            thermal_moments(-1.0)

    def test_not_finite(self):
        with pytest.raises(DomainError):
            thermal_moments(math.nan)


class TestOccupation:
    def test_unit_ratio(self):
        omega = 0.5e6
        T = constants.hbar * omega / constants.k
        assert occupation_from_temperature(T, omega) == pytest.approx(1.0 / (math.e - 1.0), rel=1e-12)

    def test_cold_limit(self):
        assert occupation_from_temperature(1e-9, 0.5e6) == 0.0

    def test_high_temperature(self):
        exact = occupation_from_temperature(300.0, 0.5e6)
        approx = high_temperature_occupation(300.0, 0.5e6)
        assert abs(exact - approx) / exact < 1e-4

    def test_non_positive_temperature(self):
        with pytest.raises(DomainError):
            occupation_from_temperature(0.0, 0.5e6)
        with pytest.raises(DomainError):
            occupation_from_temperature(-3.0, 0.5e6)


class TestCovariance:
    def test_vacuum_to_qfi(self):
        cov = moments_to_covariance(MomentVector(0.5, 0.0, 0.5), Convention.QFI)
        assert cov == CovarianceMatrix(1.0, 0.0, 1.0, Convention.QFI)

    def test_thermal_to_qfi(self):
        cov = moments_to_covariance(thermal_moments(100.0), Convention.QFI)
        assert cov == CovarianceMatrix(201.0, 0.0, 201.0, Convention.QFI)

    def test_moment_unchanged(self):
        cov = moments_to_covariance(KICKED)
        assert (cov.s11, cov.s12, cov.s22) == (100.5, -201.0, 502.5)
        assert cov.convention is Convention.MOMENT

    def test_round_trip(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            cov = random_state(rng).cov
            assert cov.to(Convention.QFI).to(Convention.MOMENT) == cov

    def test_not_positive_definite(self):
        with pytest.raises(DomainError):
            CovarianceMatrix(1.0, 2.0, 1.0)

    def test_heisenberg(self):
        with pytest.raises(DomainError):
            check_moments(MomentVector(0.4, 0.0, 0.4))
        check_moments(MomentVector(0.5, 0.0, 0.5))


class TestPurity:
    def test_vacuum(self):
        assert purity(CovarianceMatrix(0.5, 0.0, 0.5)) == 1.0

    def test_thermal(self):
        assert purity(moments_to_covariance(thermal_moments(100.0))) == pytest.approx(1.0 / 201.0, rel=1e-14)

    def test_kick_preserves(self):
        assert purity(moments_to_covariance(KICKED)) == pytest.approx(1.0 / 201.0, rel=1e-14)

    def test_conventions_agree(self):
        cov = moments_to_covariance(KICKED)
        assert purity(cov) == pytest.approx(purity(cov.to(Convention.QFI)), rel=1e-15)


class TestFidelity:
    def test_identical(self):
        a = thermal(100.0)
        assert fidelity(a, a) == pytest.approx(1.0, abs=1e-12)

    def test_vacuum_thermal(self):
        assert fidelity(thermal(0.0), thermal(1.0)) == pytest.approx(1.0 / math.sqrt(2.0), rel=1e-12)

    def test_continuity(self):
        f = fidelity(thermal(100.0), thermal(100.001))
        assert 1.0 - 1e-6 < f < 1.0

    def test_symmetric(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            a, b = random_state(rng), random_state(rng)
            assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-12)
            assert fidelity(a, a) == pytest.approx(1.0, abs=1e-12)

    def test_displacement(self):
        a = GaussianSnapshot(CovarianceMatrix(0.5, 0.0, 0.5))
        b = GaussianSnapshot(CovarianceMatrix(0.5, 0.0, 0.5), (1.0, 0.0))
        # coherent states: |<0|alpha>| = exp(-|alpha|^2 / 2) with |alpha|^2 = q^2 / 2
        assert fidelity(a, b) == pytest.approx(math.exp(-0.25), rel=1e-12)


class TestBures:
    def test_identical(self):
        a = thermal(3.0)
        assert bures_distance(a, a) == pytest.approx(0.0, abs=1e-6)

    def test_vacuum_thermal(self):
        d = bures_distance(thermal(0.0), thermal(1.0))
        assert d == pytest.approx(math.sqrt(2.0 * (1.0 - 1.0 / math.sqrt(2.0))), rel=1e-12)
        assert d == pytest.approx(0.76537, abs=1e-5)


class TestQfi:
    def test_static_family(self):
        cov = moments_to_covariance(thermal_moments(100.0))
        assert qfi_single_mode(cov, np.zeros((2, 2))) == 0.0

    def test_displacement_only(self):
        cov = CovarianceMatrix(1.0, 0.0, 1.0, Convention.QFI)
        assert qfi_single_mode(cov, np.zeros((2, 2)), (1.0, 0.0)) == pytest.approx(1.0, rel=1e-15)

    def test_thermal_closed_form(self):
        # dn/dphi = 1 gives F = 1 / (n (n + 1))
        n = 100.0
        cov = moments_to_covariance(thermal_moments(n), Convention.QFI)
        F = qfi_single_mode(cov, 2.0 * np.eye(2))
        assert F == pytest.approx(1.0 / (n * (n + 1.0)), rel=1e-12)

    def test_moment_convention_converts(self):
        n = 100.0
        cov = moments_to_covariance(thermal_moments(n))
        assert qfi_single_mode(cov, np.eye(2)) == pytest.approx(1.0 / (n * (n + 1.0)), rel=1e-12)

    def test_thermal_against_bures(self):
        n = 100.0
        F = qfi_single_mode(moments_to_covariance(thermal_moments(n)), np.eye(2))
        estimate = qfi_bures_fd(thermal, n, bures_step(F))
        assert estimate.value == pytest.approx(F, rel=1e-4)

    def test_pure_squeezing_family(self):
        r = 0.3
        cov = CovarianceMatrix(0.5 * math.exp(-2.0 * r), 0.0, 0.5 * math.exp(2.0 * r))
        dcov = np.diag([-math.exp(-2.0 * r), math.exp(2.0 * r)])
        assert qfi_single_mode(cov, dcov) == pytest.approx(2.0, rel=1e-12)

    def test_random_families_against_bures(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            r0, m = rng.uniform(0.1, 1.0), rng.uniform(0.6, 5.0)
            alpha0, rate = rng.uniform(-1.0, 1.0), rng.uniform(0.2, 2.0)

            def state_at(phi):
                return GaussianSnapshot(rotated(r0, alpha0 + rate * phi, m))

            h = 1e-6
            c_plus, c_minus = state_at(h).cov, state_at(-h).cov
            dcov = [
                (c_plus.s11 - c_minus.s11) / (2 * h),
                (c_plus.s12 - c_minus.s12) / (2 * h),
                (c_plus.s22 - c_minus.s22) / (2 * h),
            ]
            F = qfi_single_mode(state_at(0.0).cov, dcov)
            estimate = qfi_bures_fd(state_at, 0.0, bures_step(F))
            assert estimate.value == pytest.approx(F, rel=1e-3)

    def test_static_bures(self):
        a = thermal(5.0)
        assert qfi_bures_fd(lambda phi: a, 0.0, 0.1).value == 0.0

    def test_static_bures_small_steps(self):
        for state in (thermal(0.0), thermal(100.0), GaussianSnapshot(rotated(0.2, 0.3, 1.0))):
            for h in (1e-1, 1e-3, 1e-5):
                estimate = qfi_bures_fd(lambda phi: state, 0.0, h)
                assert estimate.value == 0.0
                assert estimate.discrepancy == 0.0

    def test_bures_step_domain(self):
        with pytest.raises(DomainError):
            bures_step(0.0)


class TestSqueezing:
    def test_thermal(self):
        d = squeezing_decomposition(moments_to_covariance(thermal_moments(100.0)))
        assert d.r == 0.0
        assert d.phi is None
        assert not d.phi_defined

    def test_first_kick(self):
        d = squeezing_decomposition(moments_to_covariance(KICKED))
        assert d.phi == pytest.approx(math.pi / 8.0, abs=1e-10)
        assert d.r == pytest.approx(0.5 * math.asinh(2.0 * math.sqrt(2.0)), rel=1e-12)
        assert d.r == pytest.approx(0.88137, abs=1e-5)

    def test_squeezed_vacuum(self):
        r0 = 0.3
        d = squeezing_decomposition(
            CovarianceMatrix(0.5 * math.exp(-2 * r0), 0.0, 0.5 * math.exp(2 * r0))
        )
        assert d.r == pytest.approx(r0, abs=1e-12)
        assert d.phi == 0.0
        d = squeezing_decomposition(
            CovarianceMatrix(0.5 * math.exp(2 * r0), 0.0, 0.5 * math.exp(-2 * r0))
        )
        assert d.phi == pytest.approx(0.5 * math.pi, abs=1e-15)
        assert d.purity == pytest.approx(1.0, abs=1e-12)

    def test_rotation_grid(self):
        for r0 in (0.1, 0.5, 1.0):
            for alpha in (-1.2, -0.5, 0.0, 0.3, 1.0, 1.4):
                for m in (0.5, 3.0, 100.5):
                    d = squeezing_decomposition(rotated(r0, alpha, m))
                    assert d.r == pytest.approx(r0, abs=1e-10)
                    assert d.phi == pytest.approx(alpha, abs=1e-10)

    def test_tie(self):
        # s11 == s22 with s12 < 0: 2 phi = pi / 2
        d = squeezing_decomposition(CovarianceMatrix(2.0, -1.0, 2.0))
        assert d.phi == pytest.approx(0.25 * math.pi, abs=1e-15)
        d = squeezing_decomposition(CovarianceMatrix(2.0, 1.0, 2.0))
        assert d.phi == pytest.approx(-0.25 * math.pi, abs=1e-15)

    def test_scale_invariant(self):
        cov = moments_to_covariance(KICKED)
        a = squeezing_decomposition(cov)
        b = squeezing_decomposition(cov.to(Convention.QFI))
        assert a.r == pytest.approx(b.r, rel=1e-14)
        assert a.phi == pytest.approx(b.phi, abs=1e-14)


class TestWigner:
    def test_vacuum_origin(self):
        assert wigner(CovarianceMatrix(0.5, 0.0, 0.5), 0.0, 0.0) == pytest.approx(1.0 / math.pi, rel=1e-14)

    def test_thermal_origin(self):
        w = wigner(moments_to_covariance(thermal_moments(100.0)), 0.0, 0.0)
        assert w == pytest.approx(1.0 / (2.0 * math.pi * 100.5), rel=1e-14)
        assert w == pytest.approx(0.0015836, abs=1e-7)

    def test_qfi_convention_converts(self):
        cov = moments_to_covariance(KICKED)
        assert wigner(cov.to(Convention.QFI), 3.0, -2.0) == pytest.approx(wigner(cov, 3.0, -2.0), rel=1e-14)

    def test_grid_indexing(self):
        cov = moments_to_covariance(KICKED)
        q_axis = np.array([-10.0, 0.0, 4.0])
        p_axis = np.array([-20.0, 5.0])
        w = wigner_grid(cov, q_axis, p_axis)
        assert w.shape == (3, 2)
        for i, q in enumerate(q_axis):
            for j, p in enumerate(p_axis):
                assert w[i, j] == pytest.approx(wigner(cov, q, p), rel=1e-14)

    def test_normalization(self):
        rng = np.random.default_rng(5)
        for _ in range(5):
            cov = random_state(rng).cov
            assert wigner_normalization(cov) == pytest.approx(1.0, abs=1e-6)
        assert wigner_normalization(moments_to_covariance(KICKED)) == pytest.approx(1.0, abs=1e-6)
