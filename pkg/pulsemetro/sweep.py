#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Parameter sweeps over k, theta, gamma_m, n_th and pulse count
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import itertools
import logging
import math
from pulsemetro.dynamics import SystemParams, after_kick_states, evolve
from pulsemetro.gaussian import CovarianceMatrix, DomainError, squeezing_decomposition
from pulsemetro.metrology import fit_scaling_exponent, qfi_vs_pulses

logger = logging.getLogger(__name__)

AXES = ("k", "theta", "gamma_m", "n_th", "n_pulses")
QUANTITIES = ("F", "r", "phi", "purity", "alpha", "F_max")


@dataclass(frozen=True)
class SweepPoint:
    index: int
    params: SystemParams
    n_pulses: int
    coordinates: tuple


@dataclass(frozen=True)
class SweepResult:
    point: SweepPoint
    values: dict
    error: str | None = None

    @property
    def status(self):
        return "ok" if self.error is None else f"error: {self.error}"


@dataclass(frozen=True)
class SweepGrid:
    """Cartesian grid over the named axes around a base parameter set."""

    base: SystemParams
    n_pulses: int
    axes: dict = field(default_factory=dict)
    quantities: tuple = ("F", "r", "alpha")

    def __post_init__(self):
        for name, values in self.axes.items():
            if name not in AXES:
                raise DomainError("SweepGrid", f"unknown axis '{name}'")
            if not len(values):
                raise DomainError("SweepGrid", f"axis '{name}' is empty")
        for q in self.quantities:
            if q not in QUANTITIES:
                raise DomainError("SweepGrid", f"unknown quantity '{q}'")

    def _values(self, name):
        try:
            return tuple(self.axes[name])
        except KeyError:
            pass
        if name == "n_pulses":
            return (self.n_pulses,)
        if name == "k":
            return (self.base.k,)
        return (getattr(self.base, name),)

    def points(self):
        """Row-major over AXES order."""
        grids = [self._values(name) for name in AXES]
        for i, (k, theta, gamma_m, n_th, n_pulses) in enumerate(itertools.product(*grids)):
            params = SystemParams.from_k(
                self.base.omega_m,
                gamma_m,
                n_th,
                theta,
                k,
                kappa=self.base.kappa,
                tau_p=self.base.tau_p,
                cavity_length=self.base.cavity_length,
            )
            yield SweepPoint(i, params, int(n_pulses), (k, theta, gamma_m, n_th, int(n_pulses)))

    def __len__(self):
        return math.prod(len(self._values(name)) for name in AXES)


def evaluate(point: SweepPoint, quantities):
    params, n = point.params, point.n_pulses
    values = dict()
    if {"F", "alpha", "F_max"} & set(quantities):
        traj = qfi_vs_pulses(params, n)
        if "F" in quantities:
            values["F"] = float(traj.F[-1])
        if "F_max" in quantities:
            values["F_max"] = float(traj.F.max())
        if "alpha" in quantities:
            values["alpha"] = fit_scaling_exponent(traj).alpha
    if {"r", "phi", "purity"} & set(quantities):
        state = after_kick_states(evolve(params, n), params.theta)[-1]
        decomposition = squeezing_decomposition(CovarianceMatrix(*state))
        for q in ("r", "phi", "purity"):
            if q in quantities:
                value = getattr(decomposition, q)
                values[q] = math.nan if value is None else float(value)
    return values


def sweep(grid: SweepGrid, workers: int = 1):
    """Evaluate every grid point; results come back in grid order."""
    points = list(grid.points())
    logger.info(f"sweep over {len(points)} points with {workers} worker(s)")

    def run(point):
        try:
            return SweepResult(point, evaluate(point, grid.quantities))
        except Exception as err:
            logger.warning(f"sweep point {point.index} {point.coordinates} failed: {err}")
            return SweepResult(point, dict(), str(err))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(run, points))
    return [run(p) for p in points]
