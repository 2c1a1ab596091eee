#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Interpreter to dispatch subcommands against a run configuration
"""

from inspect import getdoc
import logging
import math
from rich.table import Table
from pulsemetro.config import ConfigError, RunConfig
from pulsemetro.gaussian import ConsistencyError, DomainError, NumericError, OracleError
from pulsemetro.importer import ImporterError
from pulsemetro.langevin import IntegratorError
from pulsemetro.manager import Manager
from pulsemetro.metrology import FitError, SensitivityError
from pulsemetro.oracle import OracleDisagreement

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_ORACLE = 4


class UsageError(Exception):
    def __init__(self, command: str, message: str = "", usage: str = None):
        self.message = f"On command '{command}': {message}"
        if usage:
            self.message += f"\nUsage:\n{usage}."
        super().__init__(self.message)


class ArgumentError(Exception):
    def __init__(self, command: str, message: str = ""):
        self.message = f"On command '{command}': {message}"
        super().__init__(self.message)


def _g(value):
    if value is None:
        return "-"
    if isinstance(value, float):
        if math.isnan(value):
            return "-"
        return f"{value:.6g}"
    return str(value)


class Interpreter:
    def __init__(self, console=None):
        self.console = console
        self.commands = [
            "_".join(a.split("_")[2:]) for a in dir(self) if a.startswith("_cmd_")
        ]
        self.manager = None

    def run(self, subcommand: str, config: RunConfig, args=None):
        """
        Run one subcommand; returns (exit status, written file paths).
        """
        args = list() if args is None else list(args)
        status = EXIT_OK
        try:
            if subcommand not in self.commands:
                raise UsageError(
                    subcommand,
                    f"unrecognized command; expected one of {', '.join(self.commands)}",
                )
            self.manager = Manager(config)
            logger.info(f"{subcommand}: start")
            r = getattr(self, f"_cmd_{subcommand}")(args)
            self._show(r)
            logger.info(f"{subcommand}: done")
        except (
            ConfigError,
            UsageError,
            ArgumentError,
            ImporterError,
            NotImplementedError,
        ) as err:
            self._error(err)
            status = EXIT_CONFIG
        except OracleDisagreement as err:
            self._error(err)
            status = EXIT_ORACLE
        except OracleError as err:
            self._error(err)
            status = EXIT_ORACLE if subcommand == "oracle" else EXIT_NUMERIC
        except (
            DomainError,
            NumericError,
            ConsistencyError,
            SensitivityError,
            FitError,
            IntegratorError,
        ) as err:
            self._error(err)
            status = EXIT_NUMERIC
        written = list() if self.manager is None else list(self.manager.written)
        return status, written

    def _show(self, r):
        if self.console is None or r is None:
            return
        if isinstance(r, list):
            for item in r:
                self.console.print(item)
        else:
            self.console.print(r)

    def _error(self, err):
        logger.error(str(err))
        if self.console is not None:
            self.console.print(f"ERROR: {str(err)}", style="bold red", markup=False)

    def _cmd_evolve(self, args):
        """
        Stroboscopic second moments for n = 0..n_max as CSV (n,qq,qp,pp).
            > evolve
        """
        self._no_args("evolve", args)
        moments, filepath = self.manager.evolve()
        last = moments[-1]
        return self._table(
            ["n", "qq", "qp", "pp"],
            [[str(len(moments) - 1), *[_g(float(x)) for x in last]]],
            title=f"Wrote {filepath}",
        )

    def _cmd_fit(self, args):
        """
        Power-law fit F ~ n^alpha of a qfi CSV, written as JSON.
            > fit data/runs/qfi_k4_theta1_gamma100_n1000.csv
        """
        if len(args) != 1:
            raise UsageError(
                "fit", "expected the path of a qfi CSV file", "> fit data/runs/qfi.csv"
            )
        result, saturation, filepath = self.manager.fit(args[0])
        rows = [
            ["alpha", _g(result.alpha)],
            ["prefactor", _g(result.prefactor)],
            ["R^2", _g(result.r_squared)],
            ["window", f"{result.window[0]}..{result.window[1]}"],
            ["points", str(result.points)],
            ["policy", result.policy],
            ["low confidence", str(result.low_confidence)],
            ["saturation n", _g(saturation)],
        ]
        return self._table(["quantity", "value"], rows, title=f"Wrote {filepath}")

    def _cmd_help(self, args):
        """
        List the subcommands, or the usage of one of them.
            > help
            > help qfi
        """
        if args:
            cmd = args[0]
            try:
                msg = getdoc(getattr(self, f"_cmd_{cmd}"))
            except AttributeError:
                raise ArgumentError(
                    "help", f"Unrecognized command '{cmd}'. Try 'help' for a list of commands."
                )
            return msg
        rows = list()
        for cmd in sorted(self.commands):
            doc = getdoc(getattr(self, f"_cmd_{cmd}"))
            rows.append([cmd, doc.splitlines()[0]])
        return self._table(["command", "description"], rows)

    def _cmd_oracle(self, args):
        """
        Cross-check closed-form results against independent numerics; JSON report.
            > oracle
        """
        self._no_args("oracle", args)
        results, failed, filepath = self.manager.oracle()
        rows = list()
        for c in results:
            passed = "skipped" if c.passed is None else ("yes" if c.passed else "NO")
            rows.append([c.name, _g(c.difference), _g(c.tolerance), passed, c.note])
        table = self._table(
            ["comparison", "difference", "tolerance", "passed", "note"],
            rows,
            title=f"Wrote {filepath}",
        )
        if failed:
            self._show(table)
            raise OracleDisagreement(failed)
        return table

    def _cmd_qfi(self, args):
        """
        QFI for omega_m with squeezing and purity for n = 1..n_max as CSV.
            > qfi
        """
        self._no_args("qfi", args)
        traj, filepath = self.manager.qfi()
        i = int(traj.F.argmax())
        rows = [
            ["F(n_max)", _g(float(traj.F[-1]))],
            ["F max", f"{_g(float(traj.F[i]))} at n = {int(traj.n[i])}"],
            ["r(n_max)", _g(float(traj.r[-1]))],
            ["purity(n_max)", _g(float(traj.purity[-1]))],
            ["sensitivity", traj.sensitivity],
        ]
        return self._table(["quantity", "value"], rows, title=f"Wrote {filepath}")

    def _cmd_squeeze(self, args):
        """
        Squeezing strength r and angle phi for n = 1..n_max as CSV.
            > squeeze
        """
        self._no_args("squeeze", args)
        traj, filepath = self.manager.squeeze()
        rows = list()
        for n, r, phi in traj.rows():
            if n in (1, len(traj.n)):
                rows.append(
                    [str(n), _g(r), _g(phi), "-" if phi is None else _g(phi / math.pi)]
                )
        return self._table(
            ["n", "r", "phi (rad)", "phi / pi"], rows, title=f"Wrote {filepath} ({traj.timing})"
        )

    def _cmd_sweep(self, args):
        """
        Evaluate the configured quantities over the sweep grid; long-format CSV.
            > sweep
        """
        self._no_args("sweep", args)
        results, filepath = self.manager.sweep()
        failures = [r for r in results if r.error is not None]
        rows = [
            ["points", str(len(results))],
            ["failed", str(len(failures))],
        ]
        for r in failures:
            rows.append([f"point {r.point.index}", r.status])
        return self._table(["sweep", "value"], rows, title=f"Wrote {filepath}")

    def _cmd_validate(self, args):
        """
        Report the kick-regime conditions and the steady state of the pulse cycle.
            > validate
        """
        self._no_args("validate", args)
        conditions, steady, filepath = self.manager.validate()
        rows = list()
        for c in conditions:
            satisfied = "unevaluated" if c.satisfied is None else str(c.satisfied)
            rows.append([c.name, c.description, satisfied, _g(c.margin)])
        regime = self._table(
            ["condition", "description", "satisfied", "margin"], rows, title=f"Wrote {filepath}"
        )
        state = "diverges" if steady.diverged else ", ".join(_g(x) for x in steady.moments)
        summary = self._table(
            ["steady state", "value"],
            [
                ["spectral radius", _g(steady.spectral_radius)],
                ["cond(I - MK)", _g(steady.condition)],
                ["moments", state],
            ],
        )
        return [regime, summary]

    def _cmd_wigner(self, args):
        """
        Wigner function grid just before and after the n-th kick as CSV.
            > wigner
        """
        self._no_args("wigner", args)
        decompositions, extent, filepath = self.manager.wigner()
        rows = list()
        for when, d in decompositions.items():
            phi = "-" if d.phi is None else _g(d.phi / math.pi)
            rows.append([when, _g(d.r), phi, _g(d.purity)])
        return self._table(
            ["state", "r", "phi / pi", "purity"],
            rows,
            title=f"Wrote {filepath} (half-width {extent:.4g})",
        )

    def _no_args(self, command, args):
        if args:
            raise UsageError(command, f"unexpected arguments {' '.join(args)}", f"> {command}")

    def _table(self, columns, rows, title=None):
        """Produce a rich table for output"""
        if title:
            t = Table(title=title, title_justify="left", leading=1)
        else:
            t = Table(leading=1)
        colors = ["magenta", "cyan"]
        for i, c in enumerate(columns):
            color = colors[i % len(colors)]
            t.add_column(c, style=color)
        for r in rows:
            t.add_row(*r)
        return t
