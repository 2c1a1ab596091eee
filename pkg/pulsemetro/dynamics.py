#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Moment dynamics of the pulse-kicked mechanical resonator
"""

from dataclasses import dataclass, replace
from functools import lru_cache
import logging
import math
import numpy as np
from scipy import constants
from scipy.integrate import quad_vec
from scipy.linalg import expm, expm_frechet
from pulsemetro.gaussian import (
    ConsistencyError,
    DomainError,
    MomentVector,
    NumericError,
    thermal_moments,
)

logger = logging.getLogger(__name__)

REGIME_FACTOR = 0.1
CLOSED_FORM_CONDITION = 1e10
DUAL_PATH_TOLERANCE = 1e-6
THETA_ADVISORY = (0.01, 10.0)
# dU/d(omega_m) of the free drift matrix
DRIFT_OMEGA_DERIVATIVE = np.array(
    [[0.0, 2.0, 0.0], [-1.0, 0.0, 1.0], [0.0, -2.0, 0.0]], dtype=float
)


@dataclass(frozen=True)
class SystemParams:
    omega_m: float
    gamma_m: float
    n_th: float
    theta: float
    tau: float
    kappa: float | None = None
    tau_p: float | None = None
    cavity_length: float | None = None

    def __post_init__(self):
        checks = {
            "omega_m": self.omega_m > 0.0,
            "gamma_m": self.gamma_m >= 0.0,
            "n_th": self.n_th >= 0.0,
            "tau": self.tau > 0.0,
            "theta": True,
        }
        for name, ok in checks.items():
            value = getattr(self, name)
            if not ok or not math.isfinite(value):
                raise DomainError("SystemParams", f"invalid {name} = {value!r}")
        lo, hi = THETA_ADVISORY
        if self.theta != 0.0 and not lo <= abs(self.theta) <= hi:
            logger.warning(
                f"kick strength theta = {self.theta} lies outside the usual range ({lo}, {hi})"
            )

    @classmethod
    def from_k(cls, omega_m, gamma_m, n_th, theta, k, **regime):
        if not k > 0.0 or not math.isfinite(k):
            raise DomainError("SystemParams", f"invalid k = {k!r}")
        return cls(omega_m, gamma_m, n_th, theta, 2.0 * math.pi / (omega_m * k), **regime)

    @property
    def period(self):
        return 2.0 * math.pi / self.omega_m

    @property
    def k(self):
        return self.period / self.tau

    def replace(self, **changes):
        return replace(self, **changes)


@dataclass(frozen=True)
class RegimeCondition:
    name: str
    description: str
    satisfied: bool | None
    margin: float | None


@dataclass(frozen=True, eq=False)
class PropagatorPair:
    M: np.ndarray
    v_inh: np.ndarray

    def apply(self, v):
        return self.M @ np.asarray(v, dtype=float) + self.v_inh


@dataclass(frozen=True, eq=False)
class CycleMap:
    """One pulse period as the affine map v -> MK v + v_inh."""

    MK: np.ndarray
    v_inh: np.ndarray


@dataclass(frozen=True)
class SteadyState:
    moments: MomentVector | None
    spectral_radius: float
    diverged: bool
    condition: float


def validate_regime(params: SystemParams, factor: float = REGIME_FACTOR):
    """
    Margins of the delta-kick regime conditions; a margin is the ratio that
    must be small, and a condition holds when it is at most factor.
    """

    def judged(name, description, ratio, limit):
        if ratio is None:
            return RegimeCondition(name, description, None, None)
        return RegimeCondition(name, description, bool(ratio <= limit), float(ratio))

    kappa, tau_p, length = params.kappa, params.tau_p, params.cavity_length
    results = [
        judged(
            "i",
            "1/tau << kappa",
            None if kappa is None else (1.0 / params.tau) / kappa,
            factor,
        ),
        judged(
            "ii",
            "1/tau_p << kappa",
            None if kappa is None or tau_p is None else (1.0 / tau_p) / kappa,
            factor,
        ),
        judged(
            "iii",
            "tau_p << 1/omega_m",
            None if tau_p is None else tau_p * params.omega_m,
            factor,
        ),
        judged(
            "iv",
            "1/tau_p < c/(2L)",
            None
            if tau_p is None or length is None
            else (1.0 / tau_p) / (constants.c / (2.0 * length)),
            1.0,
        ),
    ]
    for c in results:
        if c.satisfied is None:
            logger.info(f"regime condition ({c.name}) {c.description}: unevaluated")
        elif not c.satisfied:
            logger.warning(
                f"regime condition ({c.name}) {c.description} not satisfied (margin {c.margin:.3g})"
            )
    return results


def drift_matrix(omega_m: float, gamma_m: float, A: float = 0.0):
    w = omega_m + A
    return np.array(
        [
            [0.0, 2.0 * omega_m, 0.0],
            [-w, -gamma_m, omega_m],
            [0.0, -2.0 * w, -2.0 * gamma_m],
        ],
        dtype=float,
    )


def noise_vector(n_th: float, gamma_m: float):
    return np.array([0.0, 0.0, (2.0 * n_th + 1.0) * gamma_m], dtype=float)


def expm3(U, t: float):
    """Matrix exponential exp(U t) by Pade scaling-and-squaring."""
    U = np.asarray(U, dtype=float)
    if not np.all(np.isfinite(U)) or not math.isfinite(t) or t < 0.0:
        raise DomainError("expm3", f"need finite U and t >= 0, got t = {t!r}")
    with np.errstate(over="ignore", invalid="ignore"):
        M = expm(U * t)
    if not np.all(np.isfinite(M)):
        raise NumericError("expm3", f"overflow for norm(U) t = {np.linalg.norm(U, 1) * t:.3e}")
    return M


def rotation_moments(angle: float):
    """Moment-space image of the phase-space rotation by angle (undamped drift)."""
    c, s = math.cos(angle), math.sin(angle)
    return np.array(
        [
            [c * c, 2.0 * c * s, s * s],
            [-c * s, c * c - s * s, c * s],
            [s * s, -2.0 * c * s, c * c],
        ],
        dtype=float,
    )


def free_propagator(params: SystemParams, t: float):
    if not math.isfinite(t) or t < 0.0:
        raise DomainError("free_propagator", f"need finite t >= 0, got {t!r}")
    if params.gamma_m == 0.0:
        # no noise without damping
        return PropagatorPair(rotation_moments(params.omega_m * t), np.zeros(3))
    U = drift_matrix(params.omega_m, params.gamma_m)
    M = expm3(U, t)
    N = noise_vector(params.n_th, params.gamma_m)
    v_inh = np.linalg.solve(U, (M - np.eye(3)) @ N)
    return PropagatorPair(M, v_inh)


def inhomogeneous_quadrature(params: SystemParams, t: float, epsrel: float = 1e-12):
    """v_inh as the integral of exp(U (t - s)) N over [0, t]."""
    U = drift_matrix(params.omega_m, params.gamma_m)
    N = noise_vector(params.n_th, params.gamma_m)
    if not N.any():
        return np.zeros(3)
    value, err = quad_vec(lambda s: expm(U * (t - s)) @ N, 0.0, t, epsabs=0.0, epsrel=epsrel)
    logger.debug(f"v_inh quadrature error estimate {err!r}")
    return value


def kick_matrix(theta: float):
    return np.array(
        [
            [1.0, 0.0, 0.0],
            [-2.0 * theta, 1.0, 0.0],
            [4.0 * theta * theta, -4.0 * theta, 1.0],
        ],
        dtype=float,
    )


def kick(v, theta: float):
    return kick_matrix(theta) @ np.asarray(v, dtype=float)


@lru_cache(maxsize=256)
def cycle_map(params: SystemParams):
    pair = free_propagator(params, params.tau)
    MK = pair.M @ kick_matrix(params.theta)
    MK.flags.writeable = False
    pair.v_inh.flags.writeable = False
    return CycleMap(MK, pair.v_inh)


def step(v: MomentVector, params: SystemParams):
    """Kick, then free flight for one period tau."""
    c = cycle_map(params)
    return MomentVector.from_array(c.MK @ v.as_array() + c.v_inh)


def _initial(v0, params):
    if v0 is None:
        return thermal_moments(params.n_th).as_array()
    if isinstance(v0, MomentVector):
        return v0.as_array()
    return np.asarray(v0, dtype=float)


def evolve(params: SystemParams, n_max: int, v0=None):
    """Stroboscopic moments v(n tau) for n = 0..n_max as an (n_max+1, 3) array."""
    c = cycle_map(params)
    out = np.empty((n_max + 1, 3))
    out[0] = _initial(v0, params)
    for n in range(1, n_max + 1):
        out[n] = c.MK @ out[n - 1] + c.v_inh
    return out


def closed_form(v0, params: SystemParams, n: int):
    """
    (MK)^n v0 + [I - (MK)^n](I - MK)^-1 v_inh, or None when I - MK is too
    ill-conditioned for the result to be trusted.
    """
    c = cycle_map(params)
    A = np.eye(3) - c.MK
    cond = np.linalg.cond(A)
    if not cond <= CLOSED_FORM_CONDITION:
        logger.debug(f"closed form skipped, cond(I - MK) = {cond:.3e}")
        return None
    power = np.linalg.matrix_power(c.MK, n)
    fixed = np.linalg.solve(A, c.v_inh)
    return power @ _initial(v0, params) + fixed - power @ fixed


def stroboscopic(v0, params: SystemParams, n: int, verify: bool = True):
    if n < 0:
        raise DomainError("stroboscopic", f"n must be >= 0, got {n}")
    if n == 0:
        return MomentVector.from_array(_initial(v0, params))
    closed = closed_form(v0, params, n)
    if closed is None:
        return MomentVector.from_array(evolve(params, n, v0)[-1])
    if verify:
        iterated = evolve(params, n, v0)[-1]
        diff = np.linalg.norm(closed - iterated) / np.linalg.norm(iterated)
        logger.debug(f"stroboscopic dual-path difference {diff:.3e} at n = {n}")
        if diff > DUAL_PATH_TOLERANCE:
            raise ConsistencyError(
                "stroboscopic",
                f"closed form and iteration differ by {diff:.3e} at n = {n}",
            )
    return MomentVector.from_array(closed)


def spectral_radius(A):
    return float(np.max(np.abs(np.linalg.eigvals(np.asarray(A, dtype=float)))))


def steady_moments(params: SystemParams):
    c = cycle_map(params)
    rho = spectral_radius(c.MK)
    A = np.eye(3) - c.MK
    cond = float(np.linalg.cond(A))
    if rho >= 1.0 - 1e-12:
        logger.info(f"no steady state: spectral radius {rho!r}")
        return SteadyState(None, rho, True, cond)
    fixed = np.linalg.solve(A, c.v_inh)
    return SteadyState(MomentVector.from_array(fixed), rho, False, cond)


@lru_cache(maxsize=256)
def cycle_sensitivity(params: SystemParams):
    """
    d(MK)/d(omega_m) and d(v_inh)/d(omega_m) at fixed tau, together with the
    cycle map they belong to.
    """
    c = cycle_map(params)
    U = drift_matrix(params.omega_m, params.gamma_m)
    _, dM = expm_frechet(U * params.tau, DRIFT_OMEGA_DERIVATIVE * params.tau)
    if params.gamma_m == 0.0:
        dv_inh = np.zeros(3)
    else:
        N = noise_vector(params.n_th, params.gamma_m)
        dv_inh = np.linalg.solve(U, dM @ N - DRIFT_OMEGA_DERIVATIVE @ c.v_inh)
    return c, dM @ kick_matrix(params.theta), dv_inh


def evolve_with_sensitivity(params: SystemParams, n_max: int, v0=None):
    """Moments and their exact omega_m derivatives for n = 0..n_max."""
    c, dMK, dv_inh = cycle_sensitivity(params)
    v = np.empty((n_max + 1, 3))
    dv = np.zeros((n_max + 1, 3))
    v[0] = _initial(v0, params)
    for n in range(1, n_max + 1):
        v[n] = c.MK @ v[n - 1] + c.v_inh
        dv[n] = dMK @ v[n - 1] + c.MK @ dv[n - 1] + dv_inh
    return v, dv


def after_kick_states(moments, theta: float):
    """Rows n = 1..N of K v((n-1) tau) from stroboscopic rows n = 0..N."""
    m = np.asarray(moments, dtype=float)
    return m[:-1] @ kick_matrix(theta).T
