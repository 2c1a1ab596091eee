#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Independent cross-checks of the closed-form results
"""

from dataclasses import dataclass
import logging
import numpy as np
from pulsemetro.config import RunConfig
from pulsemetro.dynamics import (
    closed_form,
    evolve,
    evolve_with_sensitivity,
    free_propagator,
    inhomogeneous_quadrature,
)
from pulsemetro.gaussian import (
    CovarianceMatrix,
    GaussianSnapshot,
    MomentVector,
    bures_step,
    qfi_bures_fd,
)
from pulsemetro.langevin import monte_carlo_moments
from pulsemetro.metrology import fd_noise_floor, moment_sensitivity, qfi_vs_pulses

logger = logging.getLogger(__name__)

TOLERANCES = {
    "bures_qfi": 1e-3,
    "v_inh_quadrature": 1e-9,
    "stroboscopic_dual_path": 1e-6,
    "sensitivity_fd": 1e-4,
}
# largest Bures step as a fraction of omega_m
BURES_MAX_STEP = 1e-3


class OracleDisagreement(RuntimeError):
    def __init__(self, failed):
        names = ", ".join(c.name for c in failed)
        self.message = f"Oracle comparisons outside tolerance: {names}"
        super().__init__(self.message)


@dataclass(frozen=True)
class Comparison:
    name: str
    difference: float | None
    tolerance: float
    passed: bool | None
    note: str = ""


def _relative(a, b):
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


class OracleSuite:
    def __init__(self, config: RunConfig):
        self.config = config
        self.params = config.system_params()
        self.n = config.oracle_pulses

    def run(self):
        names = [
            "monte_carlo",
            "bures_qfi",
            "v_inh_quadrature",
            "stroboscopic_dual_path",
            "sensitivity_fd",
        ]
        results = [getattr(self, f"_check_{name}")() for name in names]
        for c in results:
            logger.info(f"oracle {c.name}: passed={c.passed} difference={c.difference}")
        return results

    def _check_monte_carlo(self):
        reference = MomentVector.from_array(evolve(self.params, self.n)[-1])
        mc = monte_carlo_moments(
            self.params,
            self.n,
            trajectories=self.config.mc_trajectories,
            seed=self.config.seed,
            noise=self.config.mc_noise,
            steps_per_period=self.config.mc_steps_per_period,
        )
        worst = max(abs(z) for z in mc.z_scores(reference))
        return Comparison(
            "monte_carlo",
            worst,
            3.0,
            worst <= 3.0,
            f"largest |z| over {mc.trajectories} trajectories",
        )

    def _check_bures_qfi(self):
        traj = qfi_vs_pulses(self.params, self.n)
        closed = float(traj.F[-1])
        if closed <= 0.0:
            return Comparison("bures_qfi", None, TOLERANCES["bures_qfi"], None, "QFI is zero")
        w = self.params.omega_m
        h = bures_step(closed)
        if h > BURES_MAX_STEP * w:
            return Comparison(
                "bures_qfi", None, TOLERANCES["bures_qfi"], None, "QFI too small to resolve"
            )

        def state_at(omega):
            v = evolve(self.params.replace(omega_m=omega), self.n)[-1]
            return GaussianSnapshot(CovarianceMatrix(*v))

        estimate = qfi_bures_fd(
            state_at, w, h, tolerance=self.config.richardson_tolerance
        )
        diff = abs(estimate.value - closed) / closed
        tol = TOLERANCES["bures_qfi"]
        return Comparison("bures_qfi", diff, tol, diff <= tol, f"F = {closed:.6g} (s/rad)^2")

    def _check_v_inh_quadrature(self):
        tol = TOLERANCES["v_inh_quadrature"]
        exact = free_propagator(self.params, self.params.period).v_inh
        if not exact.any():
            return Comparison("v_inh_quadrature", None, tol, None, "no noise")
        quad = inhomogeneous_quadrature(self.params, self.params.period)
        diff = _relative(exact, quad)
        return Comparison("v_inh_quadrature", diff, tol, diff <= tol)

    def _check_stroboscopic_dual_path(self):
        tol = TOLERANCES["stroboscopic_dual_path"]
        n = self.config.n_max
        closed = closed_form(None, self.params, n)
        if closed is None:
            return Comparison(
                "stroboscopic_dual_path", None, tol, None, "closed form ill-conditioned; skipped"
            )
        diff = _relative(closed, evolve(self.params, n)[-1])
        return Comparison("stroboscopic_dual_path", diff, tol, diff <= tol, f"n = {n}")

    def _check_sensitivity_fd(self):
        tol = TOLERANCES["sensitivity_fd"]
        moments, derivs = evolve_with_sensitivity(self.params, self.n)
        exact = derivs[-1]
        fd = moment_sensitivity(
            self.params,
            self.n,
            self.config.h_rel,
            tolerance=self.config.richardson_tolerance,
        ).value
        floor = fd_noise_floor(moments[-1], self.params.omega_m, self.config.h_rel)
        if np.linalg.norm(exact) < floor:
            size = float(np.linalg.norm(fd))
            return Comparison(
                "sensitivity_fd", size, floor, size < floor, "zero sensitivity"
            )
        diff = _relative(fd, exact)
        return Comparison("sensitivity_fd", diff, tol, diff <= tol)


def run_oracles(config: RunConfig):
    results = OracleSuite(config).run()
    failed = [c for c in results if c.passed is False]
    return results, failed
