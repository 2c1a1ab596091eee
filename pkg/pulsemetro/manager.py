#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Manage the computations behind each subcommand and the files they write
"""

from dataclasses import asdict
import logging
import math
import numpy as np
from pathlib import Path
from pulsemetro.config import RunConfig, config_from_mapping
from pulsemetro.dynamics import evolve, kick, steady_moments, validate_regime
from pulsemetro.exporter import Exporter
from pulsemetro.gaussian import (
    CovarianceMatrix,
    MomentVector,
    check_moments,
    squeezing_decomposition,
    wigner_grid,
)
from pulsemetro.importer import Importer, ImporterError
from pulsemetro.metrology import (
    QfiTrajectory,
    cramer_rao_bound,
    fit_scaling_exponent,
    qfi_vs_pulses,
    saturation_point,
    squeezing_trajectory,
)
from pulsemetro.oracle import run_oracles
from pulsemetro.sweep import AXES, SweepGrid, sweep

logger = logging.getLogger(__name__)

WIGNER_EXTENT_SIGMAS = 5.0


def _phi_columns(phi):
    if phi is None or math.isnan(phi):
        return None, None
    return phi, phi / math.pi


class Manager:
    def __init__(self, config: RunConfig):
        self.config = config
        self.params = config.system_params()
        self.written = list()

    def _export(self, command, format, name_parts, **kwargs):
        filepath = Exporter(self.config, command).export(format, name_parts, **kwargs)
        self.written.append(filepath)
        return filepath

    def _name_parts(self, n=None):
        p = self.params
        n = self.config.n_max if n is None else n
        return [f"k{p.k:.6g}", f"theta{p.theta:.6g}", f"gamma{p.gamma_m:.6g}", f"n{n}"]

    def validate(self):
        """Regime conditions and the steady state of the cycle map."""
        conditions = validate_regime(self.params, self.config.regime_factor)
        steady = steady_moments(self.params)
        payload = {
            "conditions": [asdict(c) for c in conditions],
            "spectral_radius": steady.spectral_radius,
            "diverged": steady.diverged,
            "condition": steady.condition,
            "steady_moments": None if steady.moments is None else list(steady.moments),
        }
        filepath = self._export("validate", "json", self._name_parts(), payload=payload)
        return conditions, steady, filepath

    def evolve(self):
        """Stroboscopic moments n = 0..n_max, each checked against the Heisenberg bound."""
        moments = evolve(self.params, self.config.n_max)
        for row in moments:
            check_moments(MomentVector.from_array(row), self.config.heisenberg_tolerance)
        rows = ((n, *row) for n, row in enumerate(moments))
        filepath = self._export(
            "evolve", "csv", self._name_parts(), columns=["n", "qq", "qp", "pp"], rows=rows
        )
        return moments, filepath

    def qfi(self):
        traj = qfi_vs_pulses(
            self.params,
            self.config.n_max,
            sensitivity=self.config.sensitivity,
            h_rel=self.config.h_rel,
            tolerance=self.config.richardson_tolerance,
        )
        rows = (
            (n, F, r, *_phi_columns(phi), purity) for n, F, r, phi, purity in traj.rows()
        )
        filepath = self._export(
            "qfi",
            "csv",
            self._name_parts(),
            columns=["n", "F", "r", "phi_rad", "phi_over_pi", "purity"],
            rows=rows,
        )
        return traj, filepath

    def squeeze(self):
        traj = squeezing_trajectory(
            self.params, self.config.n_max, timing=self.config.squeeze_timing
        )
        rows = (
            (n, r, *_phi_columns(phi), traj.timing)
            for n, r, phi in traj.rows()
        )
        filepath = self._export(
            "squeeze",
            "csv",
            [*self._name_parts(), traj.timing],
            columns=["n", "r", "phi_rad", "phi_over_pi", "timing"],
            rows=rows,
        )
        return traj, filepath

    def wigner(self):
        """
        W on a square (q, p) grid just before and just after the n-th kick.
        """
        n = self.config.wigner_n
        before = evolve(self.params, n - 1)[-1]
        after = kick(before, self.params.theta)
        cov_before = CovarianceMatrix(*before)
        cov_after = CovarianceMatrix(*after)
        extent = self.config.wigner_extent
        if extent is None:
            largest = max(
                np.linalg.eigvalsh(cov_before.matrix).max(),
                np.linalg.eigvalsh(cov_after.matrix).max(),
            )
            extent = WIGNER_EXTENT_SIGMAS * math.sqrt(largest)
        axis = np.linspace(-extent, extent, self.config.wigner_points)
        w_before = wigner_grid(cov_before, axis, axis)
        w_after = wigner_grid(cov_after, axis, axis)
        size = len(axis)
        rows = (
            (axis[i], axis[j], w_before[i, j], w_after[i, j])
            for i in range(size)
            for j in range(size)
        )
        filepath = self._export(
            "wigner",
            "csv",
            self._name_parts(n),
            columns=["q", "p", "W_before", "W_after"],
            rows=rows,
        )
        decompositions = {
            "before": squeezing_decomposition(cov_before),
            "after": squeezing_decomposition(cov_after),
        }
        return decompositions, extent, filepath

    def fit(self, filepath):
        """Scaling exponent of a QFI trajectory read back from a qfi CSV file."""
        source = Path(filepath)
        data = Importer().import_data(source)
        header = data["header"]
        if header.get("command") != "qfi":
            raise ImporterError(source, f"expected a qfi file, got '{header.get('command')}'")
        for column in ("n", "F"):
            if column not in data["columns"]:
                raise ImporterError(source, f"missing column '{column}'")
        window = self.config.fit_window
        if window is None:
            window = config_from_mapping(header["config"], f"{source.name} header").fit_window
        rows = data["rows"]
        traj = QfiTrajectory.from_columns(
            np.array([r["n"] for r in rows], dtype=int),
            np.array([r["F"] for r in rows], dtype=float),
        )
        result = fit_scaling_exponent(traj, window)
        saturation = saturation_point(traj)
        payload = {
            "source": str(source),
            "fit": asdict(result),
            "saturation_n": saturation,
            "F_max": float(traj.F.max()),
            "cramer_rao_bound": cramer_rao_bound(float(traj.F[-1])),
        }
        out = self._export("fit", "json", ["from", source.stem], payload=payload)
        return result, saturation, out

    def sweep(self):
        c = self.config
        axes = {
            "k": c.sweep_k,
            "theta": c.sweep_theta,
            "gamma_m": c.sweep_gamma_m,
            "n_th": c.sweep_n_th,
            "n_pulses": c.sweep_n_pulses,
        }
        grid = SweepGrid(
            self.params,
            c.n_max,
            {name: values for name, values in axes.items() if values},
            tuple(c.sweep_quantities),
        )
        results = sweep(grid, workers=c.sweep_workers)
        rows = list()
        for result in results:
            point = result.point
            for q in grid.quantities:
                rows.append(
                    (point.index, *point.coordinates, q, result.values.get(q), result.status)
                )
        filepath = self._export(
            "sweep",
            "csv",
            [f"{len(results)} points"],
            columns=["point", *AXES, "quantity", "value", "status"],
            rows=rows,
        )
        return results, filepath

    def oracle(self):
        results, failed = run_oracles(self.config)
        payload = {
            "comparisons": [asdict(c) for c in results],
            "passed": not failed,
        }
        filepath = self._export(
            "oracle", "json", self._name_parts(self.config.oracle_pulses), payload=payload
        )
        return results, failed, filepath
