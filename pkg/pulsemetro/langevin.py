#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Monte Carlo trajectories of the Langevin equations with instantaneous kicks
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import logging
import math
import numpy as np
from scipy.linalg import expm
from pulsemetro.dynamics import SystemParams
from pulsemetro.gaussian import DomainError, MomentVector, thermal_moments

logger = logging.getLogger(__name__)

STEPS_PER_PERIOD = 10_000
BLOCK_SIZE = 2048
CHUNK_STEPS = 2048
JACKKNIFE_GROUPS = 100
PROBE_TOLERANCE = 1e-6
NOISE_MODELS = ("high_temperature", "exact")
SCHEMES = ("exponential", "euler")


class IntegratorError(RuntimeError):
    def __init__(self, message: str):
        self.message = f"Langevin integrator: {message}"
        super().__init__(self.message)


@dataclass(frozen=True)
class MonteCarloResult:
    moments: MomentVector
    standard_errors: tuple
    trajectories: int
    steps_per_pulse: int
    noise: str
    seed: int

    def z_scores(self, reference: MomentVector):
        return tuple(
            (m - r) / se if se > 0.0 else (0.0 if m == r else math.inf)
            for m, r, se in zip(self.moments, reference, self.standard_errors)
        )

    def within(self, reference: MomentVector, sigmas: float = 3.0):
        return all(abs(z) <= sigmas for z in self.z_scores(reference))


def _drift(omega_m, gamma_m):
    return np.array([[0.0, omega_m], [-omega_m, -gamma_m]], dtype=float)


def _one_step(A, dt, scheme):
    if scheme == "exponential":
        return expm(A * dt)
    return np.eye(2) + A * dt


def _probe(params: SystemParams, dt: float, scheme: str):
    """Zero-noise, undamped, unkicked norm drift over one period."""
    steps = max(1, round(params.period / dt))
    E = _one_step(_drift(params.omega_m, 0.0), dt, scheme)
    x = np.linalg.matrix_power(E, steps) @ np.array([1.0, 0.0])
    drift = abs(float(x @ x) - 1.0)
    logger.debug(f"integrator probe: {steps} steps of {dt:.3e} s, norm drift {drift:.3e}")
    if not math.isfinite(drift) or drift > PROBE_TOLERANCE:
        raise IntegratorError(
            f"{scheme} step of {dt:.3e} s is unstable: q^2 + p^2 drifts by {drift:.3e} over one period"
        )
    return drift


def _diffusion(params: SystemParams, noise: str):
    if noise == "high_temperature":
        return 2.0 * params.n_th * params.gamma_m
    return (2.0 * params.n_th + 1.0) * params.gamma_m


def _block(rngs, chol, params, n_pulses, steps, E, amplitude):
    """Integrate one block of trajectories; returns (q^2, qp, p^2) per trajectory."""
    start = np.array([rng.standard_normal(2) for rng in rngs])
    x = start @ chol.T
    q, p = x[:, 0].copy(), x[:, 1].copy()
    e00, e01, e10, e11 = E[0, 0], E[0, 1], E[1, 0], E[1, 1]
    for _ in range(n_pulses):
        p = p - 2.0 * params.theta * q
        done = 0
        while done < steps:
            chunk = min(CHUNK_STEPS, steps - done)
            if amplitude > 0.0:
                xi = amplitude * np.array([rng.standard_normal(chunk) for rng in rngs])
                xi = np.ascontiguousarray(xi.T)
            for j in range(chunk):
                q, p = e00 * q + e01 * p, e10 * q + e11 * p
                if amplitude > 0.0:
                    p = p + xi[j]
            done += chunk
    return q * q, q * p, p * p


def _jackknife(samples, groups: int):
    """Grouped jackknife standard error of the mean, groups in sample order."""
    n = len(samples)
    groups = min(groups, n)
    parts = np.array_split(np.asarray(samples), groups)
    sums = [math.fsum(part) for part in parts]
    total = math.fsum(sums)
    loo = np.array([(total - s) / (n - len(part)) for s, part in zip(sums, parts)])
    return math.sqrt((groups - 1) / groups * math.fsum((loo - loo.mean()) ** 2))


def monte_carlo_moments(
    params: SystemParams,
    n_pulses: int,
    trajectories: int = 10_000,
    seed: int = 1,
    noise: str = "high_temperature",
    steps_per_period: int = STEPS_PER_PERIOD,
    scheme: str = "exponential",
    workers: int = 1,
    v0: MomentVector = None,
):
    """
    Ensemble second moments after n_pulses kick/free-flight cycles.

    The drift of each step is the exact flow exp(A dt) ("exponential") or
    its first-order truncation ("euler"); noise enters as sqrt(D dt) xi on p.
    Trajectory i draws from its own generator spawned from (seed, i).
    """
    if trajectories < 100:
        raise DomainError("monte_carlo_moments", f"need >= 100 trajectories, got {trajectories}")
    if noise not in NOISE_MODELS:
        raise DomainError("monte_carlo_moments", f"unknown noise model '{noise}'")
    if scheme not in SCHEMES:
        raise DomainError("monte_carlo_moments", f"unknown scheme '{scheme}'")
    steps = math.ceil(params.tau / (params.period / steps_per_period) - 1e-9)
    dt = params.tau / steps
    _probe(params, dt, scheme)
    E = _one_step(_drift(params.omega_m, params.gamma_m), dt, scheme)
    amplitude = math.sqrt(_diffusion(params, noise) * dt)
    if v0 is None:
        v0 = thermal_moments(params.n_th)
    chol = np.linalg.cholesky(np.array([[v0.qq, v0.qp], [v0.qp, v0.pp]]))
    children = np.random.SeedSequence(seed).spawn(trajectories)
    rngs = [np.random.default_rng(c) for c in children]
    blocks = [rngs[i : i + BLOCK_SIZE] for i in range(0, trajectories, BLOCK_SIZE)]
    logger.info(
        f"Monte Carlo: {trajectories} trajectories, {n_pulses} pulses, {steps} steps per pulse"
    )

    def run(block):
        return _block(block, chol, params, n_pulses, steps, E, amplitude)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, blocks))
    else:
        results = [run(b) for b in blocks]
    columns = [np.concatenate([r[i] for r in results]) for i in range(3)]
    means = [math.fsum(c) / trajectories for c in columns]
    errors = tuple(_jackknife(c, JACKKNIFE_GROUPS) for c in columns)
    return MonteCarloResult(
        MomentVector(*means), errors, trajectories, steps, noise, seed
    )
