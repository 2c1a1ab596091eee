#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Test the pulsemetro.langevin module
"""

import logging
import math
import numpy as np
from pulsemetro.dynamics import SystemParams, evolve
from pulsemetro.gaussian import DomainError, MomentVector
from pulsemetro.langevin import (
    IntegratorError,
    MonteCarloResult,
    _block,
    _drift,
    _jackknife,
    _one_step,
    _probe,
    monte_carlo_moments,
)
import pytest

logger = logging.getLogger(__file__)

OMEGA = 0.5e6


def resonator(k=4.0, theta=1.0, gamma_m=100.0, n_th=100.0):
    return SystemParams.from_k(OMEGA, gamma_m, n_th, theta, k)


class TestResult:
    def test_z_scores(self):
        r = MonteCarloResult(MomentVector(1.0, 0.0, 2.0), (0.5, 0.1, 0.0), 100, 10, "exact", 1)
        assert r.z_scores(MomentVector(0.0, 0.0, 2.0)) == (2.0, 0.0, 0.0)
        assert r.within(MomentVector(0.0, 0.0, 2.0))
        assert not r.within(MomentVector(2.0, 0.0, 2.0), sigmas=1.0)
        assert math.isinf(r.z_scores(MomentVector(1.0, 0.0, 3.0))[2])


class TestJackknife:
    def test_leave_one_out(self):
        # one sample per group reproduces the standard error of the mean
        x = np.random.default_rng(1).normal(size=100)
        assert _jackknife(x, 100) == pytest.approx(np.std(x, ddof=1) / 10.0, rel=1e-10)

    def test_grouped(self):
        x = np.random.default_rng(2).normal(size=10_000)
        assert _jackknife(x, 100) == pytest.approx(0.01, rel=0.2)


class TestIntegrator:
    def test_exponential_probe(self):
        p = resonator(k=1.0, theta=0.0, gamma_m=0.0)
        assert _probe(p, p.period / 10_000, "exponential") < 1e-10

    def test_euler_probe(self):
        p = resonator(k=1.0, theta=0.0, gamma_m=0.0)
        with pytest.raises(IntegratorError):
            _probe(p, p.period / 10_000, "euler")

    def test_euler_rejected(self):
        with pytest.raises(IntegratorError):
            monte_carlo_moments(resonator(), 1, trajectories=100, scheme="euler")

    def test_zero_noise_invariant(self):
        p = resonator(k=1.0, theta=0.0, gamma_m=0.0, n_th=0.0)
        steps = 10_000
        E = _one_step(_drift(p.omega_m, 0.0), p.tau / steps, "exponential")
        children = np.random.SeedSequence(5).spawn(200)
        rngs = [np.random.default_rng(c) for c in children]
        qq, qp, pp = _block(rngs, np.eye(2), p, 1, steps, E, 0.0)
        start = np.array([np.random.default_rng(c).standard_normal(2) for c in children])
        before = (start * start).sum(axis=1)
        after = qq + pp
        assert np.all(np.abs(after - before) <= 1e-6 * before)


class TestMonteCarlo:
    def test_domain(self):
        with pytest.raises(DomainError):
            monte_carlo_moments(resonator(), 1, trajectories=99)
        with pytest.raises(DomainError):
            monte_carlo_moments(resonator(), 1, trajectories=100, noise="classical")

    def test_reproducible(self):
        p = resonator()
        a = monte_carlo_moments(p, 1, trajectories=300, seed=9)
        b = monte_carlo_moments(p, 1, trajectories=300, seed=9)
        assert a == b

    def test_workers_do_not_change_result(self, monkeypatch):
        monkeypatch.setattr("pulsemetro.langevin.BLOCK_SIZE", 128)
        p = resonator()
        a = monte_carlo_moments(p, 1, trajectories=300, seed=4, workers=1)
        b = monte_carlo_moments(p, 1, trajectories=300, seed=4, workers=3)
        assert a.moments == b.moments
        assert a.standard_errors == b.standard_errors

    def test_steps(self):
        r = monte_carlo_moments(resonator(k=4.0), 1, trajectories=100)
        assert r.steps_per_pulse == 2500
        assert r.noise == "high_temperature"

    def test_thermal_equilibrium(self):
        # strong damping relaxes a displaced start within eight periods
        p = resonator(k=1.0, theta=0.0, gamma_m=1e5)
        r = monte_carlo_moments(
            p, 8, trajectories=10_000, seed=1, noise="exact", v0=MomentVector(300.5, 0.0, 50.5)
        )
        assert r.within(MomentVector(100.5, 0.0, 100.5), sigmas=4.0)

    def test_thermal_state_stays_thermal(self):
        p = resonator(k=4.0, theta=0.0, gamma_m=100.0)
        r = monte_carlo_moments(p, 4, trajectories=10_000, seed=3, noise="exact")
        logger.debug(f"z-scores {r.z_scores(MomentVector(100.5, 0.0, 100.5))}")
        assert r.within(MomentVector(100.5, 0.0, 100.5), sigmas=3.0)

    def test_matches_moment_equations(self):
        p = resonator(k=4.0, theta=1.0)
        reference = MomentVector.from_array(evolve(p, 10)[-1])
        r = monte_carlo_moments(p, 10, trajectories=10_000, seed=1)
        logger.debug(f"z-scores {r.z_scores(reference)}")
        assert r.within(reference, sigmas=3.0)
