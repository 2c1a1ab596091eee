#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Run configuration: flat key = value files, flag overrides and defaults
"""

from dataclasses import asdict, dataclass, fields
from fractions import Fraction
import logging
import math
from pathlib import Path
import regex
from textnorm import normalize_space, normalize_unicode
from pulsemetro.dynamics import SystemParams
from pulsemetro.gaussian import occupation_from_temperature

logger = logging.getLogger(__name__)
rx_line = regex.compile(r"^(?P<key>[A-Za-z_][A-Za-z0-9_]*)\s*=\s*(?P<value>.*)$")
rx_sqrt = regex.compile(r"^sqrt\(\s*(?P<arg>[^()]+?)\s*\)$")


def norm(s: str):
    return normalize_space(normalize_unicode(s))


class ConfigError(ValueError):
    def __init__(self, where: str, message: str, key: str = None):
        if key:
            self.message = f"Configuration error at {where}, key '{key}': {message}"
        else:
            self.message = f"Configuration error at {where}: {message}"
        super().__init__(self.message)


@dataclass(frozen=True)
class RunConfig:
    omega_m: float = 0.5e6
    omega_m_unit: str = "rad_s"
    gamma_m: float = 100.0
    n_th: float = 100.0
    temperature_k: float | None = None
    theta: float = 1.0
    k: float = 4.0
    n_max: int = 1000
    kappa: float | None = 1e11
    tau_p: float | None = 1e-10
    cavity_length: float | None = None
    seed: int = 1
    h_rel: float = 1e-6
    fit_window: tuple | None = None
    out_dir: str = "data/runs"
    sweep_k: tuple = ()
    sweep_theta: tuple = ()
    sweep_gamma_m: tuple = ()
    sweep_n_th: tuple = ()
    sweep_n_pulses: tuple = ()
    sweep_quantities: tuple = ("F", "r", "alpha")
    sweep_workers: int = 1
    wigner_n: int = 1
    wigner_extent: float | None = None
    wigner_points: int = 121
    mc_trajectories: int = 10_000
    mc_noise: str = "high_temperature"
    mc_steps_per_period: int = 10_000
    oracle_pulses: int = 10
    sensitivity: str = "exact"
    squeeze_timing: str = "after_kick"
    regime_factor: float = 0.1
    richardson_tolerance: float = 1e-2
    heisenberg_tolerance: float = 1e-10

    @property
    def omega_rad_s(self):
        if self.omega_m_unit == "hz":
            return 2.0 * math.pi * self.omega_m
        return self.omega_m

    @property
    def occupation(self):
        if self.temperature_k is not None:
            return occupation_from_temperature(self.temperature_k, self.omega_rad_s)
        return self.n_th

    def system_params(self, **changes):
        values = dict(
            omega_m=self.omega_rad_s,
            gamma_m=self.gamma_m,
            n_th=self.occupation,
            theta=self.theta,
            k=self.k,
            kappa=self.kappa,
            tau_p=self.tau_p,
            cavity_length=self.cavity_length,
        )
        values.update(changes)
        k = values.pop("k")
        return SystemParams.from_k(k=k, **values)

    def as_dict(self):
        """Serializable form; re-parses to an equal RunConfig."""
        d = dict()
        for k, v in asdict(self).items():
            if v is None or v == ():
                continue
            if k == "n_th" and self.temperature_k is not None:
                continue
            if isinstance(v, tuple):
                v = list(v)
            d[k] = v
        return d

    def resolved(self):
        p = self.system_params()
        return {
            "omega_m_rad_s": p.omega_m,
            "n_th": p.n_th,
            "tau": p.tau,
            "period": p.period,
            "k": p.k,
        }


def _text(key, value):
    if key == "fit_window":
        return f"{value[0]}:{value[1]}"
    if isinstance(value, (list, tuple)):
        return ",".join(_text(None, v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


class ConfigParser:
    KEYS = tuple(f.name for f in fields(RunConfig))

    def __init__(self):
        self.values = dict()
        self.explicit = dict()

    def parse(self, key: str, value: str, where: str):
        key = norm(key).lower()
        value = norm(value)
        try:
            prep = getattr(self, f"_prep_param_{key}")
        except AttributeError:
            raise ConfigError(
                where, f"unknown key; valid keys are {', '.join(self.KEYS)}", key
            )
        if value == "":
            raise ConfigError(where, "empty value; omit the key to use its default", key)
        try:
            self.values[key] = prep(value)
        except (ValueError, ZeroDivisionError, OverflowError) as err:
            raise ConfigError(where, f"malformed value '{value}' ({err})", key)
        self.explicit[key] = where

    def build(self):
        if "temperature_k" in self.explicit and "n_th" in self.explicit:
            raise ConfigError(
                self.explicit["n_th"],
                f"n_th conflicts with temperature_k set at {self.explicit['temperature_k']}",
                "n_th",
            )
        return RunConfig(**self.values)

    # scalar converters

    def _float(self, value, lower=None, strict=True):
        x = float(value)
        if not math.isfinite(x):
            raise ValueError("not finite")
        if lower is not None and (x <= lower if strict else x < lower):
            raise ValueError(f"must be {'>' if strict else '>='} {lower}")
        return x

    def _int(self, value, lower=None):
        x = int(value)
        if lower is not None and x < lower:
            raise ValueError(f"must be >= {lower}")
        return x

    def _choice(self, value, options):
        v = value.lower()
        if v not in options:
            raise ValueError(f"expected one of {', '.join(options)}")
        return v

    def _list(self, value, convert):
        return tuple(convert(v.strip()) for v in value.split(",") if v.strip())

    def _k(self, value):
        m = rx_sqrt.match(value)
        if m:
            x = math.sqrt(float(Fraction(m.group("arg"))))
        else:
            x = float(Fraction(value))
        if not x > 0.0 or not math.isfinite(x):
            raise ValueError("k must be > 0")
        return x

    # keys

    def _prep_param_omega_m(self, value):
        return self._float(value, 0.0)

    def _prep_param_omega_m_unit(self, value):
        return self._choice(value, ("rad_s", "hz"))

    def _prep_param_gamma_m(self, value):
        return self._float(value, 0.0, strict=False)

    def _prep_param_n_th(self, value):
        return self._float(value, 0.0, strict=False)

    def _prep_param_temperature_k(self, value):
        return self._float(value, 0.0)

    def _prep_param_theta(self, value):
        return self._float(value)

    def _prep_param_k(self, value):
        return self._k(value)

    def _prep_param_n_max(self, value):
        return self._int(value, 1)

    def _prep_param_kappa(self, value):
        return self._float(value, 0.0)

    def _prep_param_tau_p(self, value):
        return self._float(value, 0.0)

    def _prep_param_cavity_length(self, value):
        return self._float(value, 0.0)

    def _prep_param_seed(self, value):
        return self._int(value, 0)

    def _prep_param_h_rel(self, value):
        x = self._float(value, 0.0)
        if not 1e-10 < x < 1e-2:
            raise ValueError("must lie in (1e-10, 1e-2)")
        return x

    def _prep_param_fit_window(self, value):
        if value.lower() == "auto":
            return None
        lo, sep, hi = value.partition(":")
        if not sep:
            raise ValueError("expected auto or n_lo:n_hi")
        lo, hi = int(lo), int(hi)
        if not 1 <= lo < hi:
            raise ValueError("need 1 <= n_lo < n_hi")
        return (lo, hi)

    def _prep_param_out_dir(self, value):
        return value

    def _prep_param_sweep_k(self, value):
        return self._list(value, self._k)

    def _prep_param_sweep_theta(self, value):
        return self._list(value, self._float)

    def _prep_param_sweep_gamma_m(self, value):
        return self._list(value, lambda v: self._float(v, 0.0, strict=False))

    def _prep_param_sweep_n_th(self, value):
        return self._list(value, lambda v: self._float(v, 0.0, strict=False))

    def _prep_param_sweep_n_pulses(self, value):
        return self._list(value, lambda v: self._int(v, 1))

    def _prep_param_sweep_quantities(self, value):
        options = ("F", "r", "phi", "purity", "alpha", "F_max")

        def quantity(v):
            if v not in options:
                raise ValueError(f"unknown quantity '{v}'")
            return v

        return self._list(value, quantity)

    def _prep_param_sweep_workers(self, value):
        return self._int(value, 1)

    def _prep_param_wigner_n(self, value):
        return self._int(value, 1)

    def _prep_param_wigner_extent(self, value):
        if value.lower() == "auto":
            return None
        return self._float(value, 0.0)

    def _prep_param_wigner_points(self, value):
        x = self._int(value, 11)
        if x % 2 == 0:
            raise ValueError("must be odd so the grid contains the origin")
        return x

    def _prep_param_mc_trajectories(self, value):
        return self._int(value, 100)

    def _prep_param_mc_noise(self, value):
        return self._choice(value, ("high_temperature", "exact"))

    def _prep_param_mc_steps_per_period(self, value):
        return self._int(value, 10_000)

    def _prep_param_oracle_pulses(self, value):
        return self._int(value, 1)

    def _prep_param_sensitivity(self, value):
        return self._choice(value, ("exact", "fd"))

    def _prep_param_squeeze_timing(self, value):
        return self._choice(value, ("after_kick", "stroboscopic"))

    def _prep_param_regime_factor(self, value):
        return self._float(value, 0.0)

    def _prep_param_richardson_tolerance(self, value):
        return self._float(value, 0.0)

    def _prep_param_heisenberg_tolerance(self, value):
        return self._float(value, 0.0, strict=False)


def parse_config(filepath=None, overrides: dict = None):
    """
    Build a RunConfig from an optional key = value file and flag overrides;
    flags win over the file, defaults fill the rest.
    """
    parser = ConfigParser()
    if filepath is not None:
        path = Path(filepath).expanduser()
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as err:
            raise ConfigError(str(path), f"cannot read file ({err.strerror})")
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = norm(raw)
            if not line or line.startswith("#"):
                continue
            m = rx_line.match(line)
            if not m:
                raise ConfigError(f"{path.name} line {lineno}", f"expected 'key = value', got '{line}'")
            parser.parse(m.group("key"), m.group("value"), f"{path.name} line {lineno}")
        logger.debug(f"read {len(parser.values)} keys from {path}")
    if overrides:
        for key, value in overrides.items():
            if value is None:
                continue
            parser.parse(key, str(value), "command line")
    return parser.build()


def config_from_mapping(mapping: dict, where: str = "header"):
    """Re-parse the serialized form produced by RunConfig.as_dict()."""
    parser = ConfigParser()
    for key, value in mapping.items():
        parser.parse(key, _text(key, value), where)
    return parser.build()
