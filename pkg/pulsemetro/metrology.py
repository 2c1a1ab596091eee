#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Frequency and mass metrology of the kicked resonator: sensitivities, QFI
and squeezing trajectories, power-law fits and Cramer-Rao bounds
"""

from dataclasses import dataclass, field
import logging
import math
import numpy as np
from scipy.stats import linregress
from pulsemetro.dynamics import (
    SystemParams,
    after_kick_states,
    cycle_map,
    evolve,
    evolve_with_sensitivity,
    spectral_radius,
)
from pulsemetro.gaussian import (
    HEISENBERG_TOLERANCE,
    DomainError,
    NumericError,
    purity_columns,
    qfi_columns,
    squeezing_columns,
)

logger = logging.getLogger(__name__)

RICHARDSON_TOLERANCE = 1e-3
RISE_FRACTION = 0.9
BINS_PER_DECADE = 20
# default fit window starts here once the rise spans a further decade
FIT_START = 10
MIN_FIT_POINTS = 5
LOW_CONFIDENCE_R2 = 0.9
SATURATION_TOLERANCE = 1e-3
# smallest det / (qq pp) a row may keep before its determinant is cancellation noise
DET_RESOLUTION = 1e-10
SENSITIVITY_METHODS = ("exact", "fd")
TIMINGS = ("after_kick", "stroboscopic")


class SensitivityError(RuntimeError):
    def __init__(self, coarse, fine, discrepancy: float):
        self.coarse = coarse
        self.fine = fine
        self.discrepancy = discrepancy
        self.message = (
            f"Finite-difference sensitivity did not converge: {np.asarray(coarse).tolist()} "
            f"vs {np.asarray(fine).tolist()} (relative discrepancy {discrepancy:.3e})"
        )
        super().__init__(self.message)


class FitError(RuntimeError):
    def __init__(self, message: str):
        self.message = f"Scaling fit: {message}"
        super().__init__(self.message)


@dataclass(frozen=True, eq=False)
class SensitivityEstimate:
    value: np.ndarray
    coarse: np.ndarray
    fine: np.ndarray
    discrepancy: float
    h_rel: float


@dataclass(eq=False)
class QfiTrajectory:
    """Columns n, F ((s/rad)^2), r, phi (NaN when undefined) and purity."""

    n: np.ndarray
    F: np.ndarray
    r: np.ndarray
    phi: np.ndarray
    purity: np.ndarray
    params: SystemParams | None = None
    sensitivity: str = "exact"

    def __post_init__(self):
        if len(self.n) and np.any(np.diff(self.n) <= 0):
            raise DomainError("QfiTrajectory", "pulse index must be strictly increasing")
        if np.any(self.F < 0.0):
            raise DomainError("QfiTrajectory", "negative QFI")

    @classmethod
    def from_columns(cls, n, F, **kwargs):
        n = np.asarray(n)
        blank = np.full(len(n), np.nan)
        return cls(
            n,
            np.asarray(F, dtype=float),
            kwargs.pop("r", blank),
            kwargs.pop("phi", blank),
            kwargs.pop("purity", blank),
            **kwargs,
        )

    def __len__(self):
        return len(self.n)

    def rows(self):
        for i in range(len(self.n)):
            yield int(self.n[i]), float(self.F[i]), float(self.r[i]), float(self.phi[i]), float(self.purity[i])

    def at(self, n: int):
        i = int(np.searchsorted(self.n, n))
        if i >= len(self.n) or self.n[i] != n:
            raise KeyError(n)
        return float(self.F[i])


@dataclass(eq=False)
class SqueezingTrajectory:
    n: np.ndarray
    r: np.ndarray
    phi: np.ndarray
    timing: str

    def rows(self):
        for i in range(len(self.n)):
            phi = float(self.phi[i])
            yield int(self.n[i]), float(self.r[i]), (None if math.isnan(phi) else phi)


@dataclass(frozen=True)
class FitResult:
    alpha: float
    prefactor: float
    r_squared: float
    window: tuple
    points: int
    policy: str
    low_confidence: bool = field(default=False)


def fd_noise_floor(moments, omega_m: float, h_rel: float):
    """Derivative size below which central differences return rounding noise."""
    size = np.linalg.norm(np.atleast_2d(moments), axis=1)
    floor = 1e4 * np.finfo(float).eps * size / (omega_m * h_rel)
    return floor if np.ndim(moments) > 1 else float(floor[0])


def _derivative(params, n, h, v0, stencil):
    w = params.omega_m

    def v(scale):
        return evolve(params.replace(omega_m=w * (1.0 + scale)), n, v0)[-1]

    if stencil == 4:
        return (-v(2 * h) + 8.0 * v(h) - 8.0 * v(-h) + v(-2 * h)) / (12.0 * w * h)
    return (v(h) - v(-h)) / (2.0 * w * h)


def moment_sensitivity(
    params: SystemParams,
    n: int,
    h_rel: float = 1e-6,
    v0=None,
    stencil: int = 2,
    tolerance: float = RICHARDSON_TOLERANCE,
):
    """
    dv/d(omega_m) after n pulses by central differences at fixed tau, checked
    by halving the step; the Richardson-combined value is returned.
    """
    if not 1e-10 < h_rel < 1e-2:
        raise DomainError("moment_sensitivity", f"h_rel must lie in (1e-10, 1e-2), got {h_rel}")
    if stencil not in (2, 4):
        raise DomainError("moment_sensitivity", f"unsupported stencil {stencil}")
    coarse = _derivative(params, n, h_rel, v0, stencil)
    fine = _derivative(params, n, 0.5 * h_rel, v0, stencil)
    order = 2 ** (2 if stencil == 2 else 4)
    value = (order * fine - coarse) / (order - 1)
    floor = fd_noise_floor(evolve(params, n, v0)[-1], params.omega_m, h_rel)
    discrepancy = float(np.linalg.norm(coarse - fine) / max(np.linalg.norm(value), floor))
    logger.debug(f"sensitivity at n = {n}: discrepancy {discrepancy:.3e}")
    if discrepancy > tolerance:
        raise SensitivityError(coarse, fine, discrepancy)
    return SensitivityEstimate(value, coarse, fine, discrepancy, h_rel)


def _fd_columns(params, n_max, h_rel, v0, tolerance):
    w = params.omega_m

    def columns(h):
        plus = evolve(params.replace(omega_m=w * (1.0 + h)), n_max, v0)
        minus = evolve(params.replace(omega_m=w * (1.0 - h)), n_max, v0)
        return (plus - minus) / (2.0 * w * h)

    coarse = columns(h_rel)
    fine = columns(0.5 * h_rel)
    value = (4.0 * fine - coarse) / 3.0
    moments = evolve(params, n_max, v0)
    floor = fd_noise_floor(moments, w, h_rel)
    discrepancy = np.linalg.norm(coarse - fine, axis=1) / np.maximum(
        np.linalg.norm(value, axis=1), floor
    )
    worst = int(np.argmax(discrepancy))
    if discrepancy[worst] > tolerance:
        raise SensitivityError(coarse[worst], fine[worst], float(discrepancy[worst]))
    return moments, value


def _check_resolved(states, params: SystemParams, what: str):
    """
    Raise NumericError at the first state (rows n = 1, 2, ...) whose
    determinant is below the Heisenberg bound or lost to cancellation.
    """
    s = np.asarray(states, dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        scale = s[:, 0] * s[:, 2]
        det = scale - s[:, 1] * s[:, 1]
        bound = np.maximum(
            0.25 - HEISENBERG_TOLERANCE * np.maximum(1.0, scale), DET_RESOLUTION * scale
        )
        bad = ~np.isfinite(det) | (s[:, 0] <= 0.0) | (s[:, 2] <= 0.0) | (det < bound)
    if not bad.any():
        return
    i = int(np.argmax(bad))
    rho = spectral_radius(cycle_map(params).MK)
    raise NumericError(
        what,
        f"moments lost the Heisenberg bound at n = {i + 1} (det = {det[i]!r}, "
        f"qq pp = {scale[i]!r}); cycle-map spectral radius {rho:.6g}",
    )


def qfi_vs_pulses(
    params: SystemParams,
    n_max: int,
    sensitivity: str = "exact",
    h_rel: float = 1e-6,
    v0=None,
    tolerance: float = RICHARDSON_TOLERANCE,
):
    """
    QFI for omega_m with squeezing and purity of the stroboscopic state after
    each of n = 1..n_max pulses.
    """
    if n_max < 1:
        raise DomainError("qfi_vs_pulses", f"n_max must be >= 1, got {n_max}")
    if sensitivity == "exact":
        moments, derivs = evolve_with_sensitivity(params, n_max, v0)
    elif sensitivity == "fd":
        moments, derivs = _fd_columns(params, n_max, h_rel, v0, tolerance)
    else:
        raise DomainError("qfi_vs_pulses", f"unknown sensitivity method '{sensitivity}'")
    states = moments[1:]
    _check_resolved(states, params, "qfi_vs_pulses")
    F = qfi_columns(states, derivs[1:])
    r, phi = squeezing_columns(states)
    logger.info(f"QFI trajectory to n = {n_max}: final F = {F[-1]:.6g} (s/rad)^2")
    return QfiTrajectory(
        np.arange(1, n_max + 1),
        F,
        r,
        phi,
        purity_columns(states),
        params=params,
        sensitivity=sensitivity,
    )


def squeezing_trajectory(params: SystemParams, n_max: int, timing: str = "after_kick", v0=None):
    """
    Squeezing strength and angle for n = 1..n_max, either just after the n-th
    kick or at the stroboscopic time n tau.
    """
    if n_max < 1:
        raise DomainError("squeezing_trajectory", f"n_max must be >= 1, got {n_max}")
    moments = evolve(params, n_max, v0)
    if timing == "after_kick":
        states = after_kick_states(moments, params.theta)
    elif timing == "stroboscopic":
        states = moments[1:]
    else:
        raise DomainError("squeezing_trajectory", f"unknown timing '{timing}'")
    _check_resolved(states, params, "squeezing_trajectory")
    r, phi = squeezing_columns(states)
    return SqueezingTrajectory(np.arange(1, n_max + 1), r, phi, timing)


def mass_qfi(F_omega, k_m, M):
    """QFI for the mass from the frequency QFI, scaled by k_m / (4 M^3)."""
    if not k_m > 0 or not M > 0:
        raise DomainError("mass_qfi", f"k_m and M must be > 0, got {k_m}, {M}")
    return F_omega * k_m / (4 * M**3)


def cramer_rao_bound(F: float, repetitions: int = 1):
    """Smallest standard deviation of an unbiased estimate from nu repetitions."""
    if repetitions < 1:
        raise DomainError("cramer_rao_bound", f"repetitions must be >= 1, got {repetitions}")
    if F <= 0.0:
        return math.inf
    return 1.0 / math.sqrt(repetitions * F)


def _rise_window(n, F):
    threshold = RISE_FRACTION * F.max()
    i = int(np.argmax(F >= threshold))
    lo, hi = int(n[0]), int(n[i])
    if lo < FIT_START and hi >= 10 * FIT_START:
        lo = FIT_START
    return lo, hi


def _log_bins(n, F, per_decade):
    """Mean ln n and mean ln F over bins of 1/per_decade decade."""
    bins = np.floor(np.log10(n.astype(float)) * per_decade + 1e-9).astype(int)
    _, inverse, counts = np.unique(bins, return_inverse=True, return_counts=True)
    x = np.bincount(inverse, weights=np.log(n.astype(float))) / counts
    y = np.bincount(inverse, weights=np.log(F)) / counts
    return x, y


def fit_scaling_exponent(traj: QfiTrajectory, window=None, bins_per_decade=BINS_PER_DECADE):
    """
    Least-squares slope of ln F against ln n.

    Without an explicit (n_lo, n_hi) the window ends at the first n where F
    reaches 90% of its maximum and starts at n = 10 when that leaves at least
    a decade, else at the first row. Rows are averaged in log-n bins of
    bins_per_decade per decade unless bins_per_decade is None.
    """
    n = np.asarray(traj.n)
    F = np.asarray(traj.F, dtype=float)
    if len(n) == 0 or not np.any(F > 0.0):
        raise FitError("no positive QFI values")
    if window is None:
        window = _rise_window(n, F)
        policy = f"rise-{RISE_FRACTION:g}"
    else:
        window = (int(window[0]), int(window[1]))
        policy = "explicit"
    mask = (n >= window[0]) & (n <= window[1]) & (F > 0.0)
    n_fit, F_fit = n[mask], F[mask]
    if bins_per_decade and len(n_fit) > 1:
        x, y = _log_bins(n_fit, F_fit, bins_per_decade)
        policy += f", log-bins-{bins_per_decade}"
    else:
        x, y = np.log(n_fit.astype(float)), np.log(F_fit)
    if len(x) < MIN_FIT_POINTS:
        raise FitError(
            f"{len(x)} usable points in window {window}; need at least {MIN_FIT_POINTS}"
        )
    result = linregress(x, y)
    r_squared = min(1.0, max(0.0, float(result.rvalue) ** 2))
    low = r_squared < LOW_CONFIDENCE_R2
    if low:
        logger.warning(f"low-confidence scaling fit: R^2 = {r_squared:.3f} over {window}")
    return FitResult(
        float(result.slope),
        float(math.exp(result.intercept)),
        r_squared,
        window,
        int(len(x)),
        policy,
        low,
    )


def saturation_point(traj: QfiTrajectory, tolerance: float = SATURATION_TOLERANCE):
    """First n with |F(n) - F(2n)| / F(2n) below tolerance, or None."""
    for n, F in zip(traj.n, traj.F):
        try:
            F2 = traj.at(2 * int(n))
        except KeyError:
            break
        if F2 > 0.0 and abs(F - F2) / F2 < tolerance:
            return int(n)
    return None
