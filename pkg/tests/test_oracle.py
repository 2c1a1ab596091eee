#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Test the pulsemetro.oracle module
"""

import logging
from pulsemetro.config import RunConfig
from pulsemetro.dynamics import evolve
from pulsemetro.gaussian import MomentVector
from pulsemetro.langevin import MonteCarloResult
from pulsemetro.oracle import (
    Comparison,
    OracleDisagreement,
    OracleSuite,
    TOLERANCES,
    run_oracles,
)
import pytest

logger = logging.getLogger(__file__)


def exact_monte_carlo(params, n_pulses, trajectories, seed, noise, steps_per_period):
    moments = MomentVector.from_array(evolve(params, n_pulses)[-1])
    return MonteCarloResult(moments, (1.0, 1.0, 1.0), trajectories, 2500, noise, seed)


class TestChecks:
    def test_bures(self):
        c = OracleSuite(RunConfig())._check_bures_qfi()
        assert c.passed
        assert c.difference < TOLERANCES["bures_qfi"]

    def test_bures_unresolvable(self):
        c = OracleSuite(RunConfig(theta=0.0))._check_bures_qfi()
        assert c.passed is None

    def test_quadrature(self):
        c = OracleSuite(RunConfig())._check_v_inh_quadrature()
        assert c.passed
        assert c.difference < 1e-9

    def test_quadrature_without_noise(self):
        c = OracleSuite(RunConfig(gamma_m=0.0))._check_v_inh_quadrature()
        assert c.passed is None
        assert c.note == "no noise"

    def test_dual_path(self):
        skipped = OracleSuite(RunConfig())._check_stroboscopic_dual_path()
        assert skipped.passed is None
        c = OracleSuite(RunConfig(k=5.0))._check_stroboscopic_dual_path()
        assert c.passed
        assert c.difference < 1e-8

    def test_sensitivity(self):
        c = OracleSuite(RunConfig())._check_sensitivity_fd()
        assert c.passed
        assert c.note == ""

    def test_zero_sensitivity(self):
        c = OracleSuite(RunConfig(theta=0.0))._check_sensitivity_fd()
        assert c.passed
        assert c.note == "zero sensitivity"


class TestRun:
    def test_all_pass(self, monkeypatch):
        monkeypatch.setattr("pulsemetro.oracle.monte_carlo_moments", exact_monte_carlo)
        results, failed = run_oracles(RunConfig())
        assert [c.name for c in results] == [
            "monte_carlo",
            "bures_qfi",
            "v_inh_quadrature",
            "stroboscopic_dual_path",
            "sensitivity_fd",
        ]
        assert failed == []
        assert results[0].difference == 0.0

    def test_disagreement(self, monkeypatch):
        monkeypatch.setitem(TOLERANCES, "v_inh_quadrature", 0.0)
        monkeypatch.setattr("pulsemetro.oracle.monte_carlo_moments", exact_monte_carlo)
        results, failed = run_oracles(RunConfig())
        assert [c.name for c in failed] == ["v_inh_quadrature"]
        err = OracleDisagreement(failed)
        assert "v_inh_quadrature" in str(err)

    def test_comparison_fields(self):
        c = Comparison("x", 0.5, 1.0, True)
        assert c.note == ""
