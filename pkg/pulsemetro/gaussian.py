#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Single-mode Gaussian state mathematics: moments, covariance conventions,
purity, fidelity, Bures distance, QFI, squeezing and Wigner functions
"""

from dataclasses import dataclass
from enum import Enum
import logging
import math
import numpy as np
from scipy import constants
from scipy.integrate import trapezoid

logger = logging.getLogger(__name__)

HEISENBERG_TOLERANCE = 1e-10
PURE_TOLERANCE = 1e-9
TIE_TOLERANCE = 1e-12
ASIN_CLAMP = 1e-10
ANISOTROPY_THRESHOLD = 1e-12
BURES_TARGET = 1e-5
# 1 - f at or below this is fidelity rounding
FIDELITY_FLOOR = 16.0 * np.finfo(float).eps


class DomainError(ValueError):
    def __init__(self, what: str, message: str = ""):
        self.message = f"{what}: {message}"
        super().__init__(self.message)


class NumericError(RuntimeError):
    def __init__(self, what: str, message: str = ""):
        self.message = f"{what}: {message}"
        super().__init__(self.message)


class ConsistencyError(RuntimeError):
    def __init__(self, what: str, message: str = ""):
        self.message = f"Internal consistency failure in {what}: {message}"
        super().__init__(self.message)


class OracleError(RuntimeError):
    def __init__(self, what: str, coarse: float, fine: float, discrepancy: float):
        self.coarse = coarse
        self.fine = fine
        self.discrepancy = discrepancy
        self.message = (
            f"Oracle {what} is unreliable: step pair gave {coarse!r} and {fine!r} "
            f"(relative discrepancy {discrepancy:.3e})"
        )
        super().__init__(self.message)


class Convention(Enum):
    """Covariance normalization: vacuum is I/2 (MOMENT) or I (QFI)."""

    MOMENT = "moment"
    QFI = "qfi"

    @property
    def vacuum_det(self):
        return 0.25 if self is Convention.MOMENT else 1.0


# entries scale by this factor when converting MOMENT -> QFI
CONVENTION_SCALE = 2.0


@dataclass(frozen=True)
class MomentVector:
    """Second moments (<q^2>, <(pq+qp)/2>, <p^2>) in dimensionless units."""

    qq: float
    qp: float
    pp: float

    @classmethod
    def from_array(cls, a):
        return cls(float(a[0]), float(a[1]), float(a[2]))

    def as_array(self):
        return np.array([self.qq, self.qp, self.pp], dtype=float)

    @property
    def determinant(self):
        return self.qq * self.pp - self.qp * self.qp

    def __iter__(self):
        return iter((self.qq, self.qp, self.pp))


@dataclass(frozen=True)
class CovarianceMatrix:
    s11: float
    s12: float
    s22: float
    convention: Convention = Convention.MOMENT

    def __post_init__(self):
        entries = (self.s11, self.s12, self.s22)
        if not all(math.isfinite(x) for x in entries):
            raise DomainError("CovarianceMatrix", f"non-finite entries {entries}")
        if self.s11 <= 0.0 or self.s22 <= 0.0 or self.det <= 0.0:
            raise DomainError(
                "CovarianceMatrix", f"not positive-definite: {entries}"
            )

    @property
    def det(self):
        return self.s11 * self.s22 - self.s12 * self.s12

    @property
    def matrix(self):
        return np.array([[self.s11, self.s12], [self.s12, self.s22]], dtype=float)

    def to(self, convention: Convention):
        if convention is self.convention:
            return self
        if convention is Convention.QFI:
            c = CONVENTION_SCALE
        else:
            c = 1.0 / CONVENTION_SCALE
        return CovarianceMatrix(self.s11 * c, self.s12 * c, self.s22 * c, convention)


@dataclass(frozen=True)
class SqueezingDecomposition:
    r: float
    phi: float | None
    purity: float

    @property
    def phi_defined(self):
        return self.phi is not None


@dataclass(frozen=True)
class GaussianSnapshot:
    """A Gaussian state; means live in the same convention as the covariance."""

    cov: CovarianceMatrix
    mean: tuple = (0.0, 0.0)

    def to(self, convention: Convention):
        if convention is self.cov.convention:
            return self
        if convention is Convention.QFI:
            c = math.sqrt(CONVENTION_SCALE)
        else:
            c = 1.0 / math.sqrt(CONVENTION_SCALE)
        return GaussianSnapshot(
            self.cov.to(convention), (self.mean[0] * c, self.mean[1] * c)
        )


@dataclass(frozen=True)
class BuresEstimate:
    value: float
    coarse: float
    fine: float
    discrepancy: float
    h: float


def thermal_moments(n_th: float):
    if not math.isfinite(n_th) or n_th < 0.0:
        raise DomainError("thermal_moments", f"n_th must be finite and >= 0, got {n_th}")
    return MomentVector(n_th + 0.5, 0.0, n_th + 0.5)


def occupation_from_temperature(temperature: float, omega_m: float):
    """Bose-Einstein occupation at temperature (K) for angular frequency (rad/s)."""
    if not temperature > 0.0:
        raise DomainError(
            "occupation_from_temperature", f"temperature must be > 0 K, got {temperature}"
        )
    if not omega_m > 0.0:
        raise DomainError(
            "occupation_from_temperature", f"omega_m must be > 0, got {omega_m}"
        )
    x = constants.hbar * omega_m / (constants.k * temperature)
    if x > 700.0:
        return 0.0
    return 1.0 / math.expm1(x)


def high_temperature_occupation(temperature: float, omega_m: float):
    if not temperature > 0.0 or not omega_m > 0.0:
        raise DomainError(
            "high_temperature_occupation",
            f"temperature and omega_m must be > 0, got {temperature}, {omega_m}",
        )
    return constants.k * temperature / (constants.hbar * omega_m)


def heisenberg_margin(v: MomentVector):
    return v.determinant - 0.25


def check_moments(v: MomentVector, tolerance: float = HEISENBERG_TOLERANCE):
    if not (v.qq > 0.0 and v.pp > 0.0):
        raise DomainError("MomentVector", f"diagonal moments must be > 0, got {v}")
    scale = max(1.0, v.qq * v.pp)
    if heisenberg_margin(v) < -tolerance * scale:
        raise DomainError(
            "MomentVector", f"Heisenberg bound violated (det = {v.determinant!r})"
        )
    return v


def moments_to_covariance(v: MomentVector, convention: Convention = Convention.MOMENT):
    check_moments(v)
    cov = CovarianceMatrix(v.qq, v.qp, v.pp, Convention.MOMENT)
    return cov.to(convention)


def purity(cov: CovarianceMatrix):
    ratio = cov.convention.vacuum_det / cov.det
    if ratio > 1.0 + PURE_TOLERANCE:
        raise DomainError(
            "purity", f"determinant {cov.det!r} below the pure-state bound"
        )
    return min(1.0, math.sqrt(ratio))


def fidelity(a: GaussianSnapshot, b: GaussianSnapshot):
    """
    Root fidelity of two single-mode Gaussian states.

    The closed form below yields the squared Uhlmann fidelity; its square root
    is returned so that vacuum against thermal n gives 1/sqrt(n+1).
    """
    a = a.to(Convention.QFI)
    b = b.to(Convention.QFI)
    s = a.cov.matrix + b.cov.matrix
    big = float(np.linalg.det(s))
    if not math.isfinite(big) or big <= 0.0:
        raise NumericError("fidelity", f"singular covariance sum {s.tolist()}")
    small = (a.cov.det - 1.0) * (b.cov.det - 1.0)
    if small < 0.0:
        if small < -PURE_TOLERANCE * big:
            raise DomainError("fidelity", f"unphysical determinants ({a.cov.det}, {b.cov.det})")
        small = 0.0
    dx = np.asarray(a.mean, dtype=float) - np.asarray(b.mean, dtype=float)
    exponent = -0.5 * float(dx @ np.linalg.solve(s, dx))
    # sqrt(big + small) - sqrt(small) without the cancellation
    squared = 2.0 * math.exp(exponent) * (math.sqrt(big + small) + math.sqrt(small)) / big
    if squared > 1.0 + PURE_TOLERANCE:
        raise ConsistencyError("fidelity", f"value {squared!r} exceeds 1")
    return math.sqrt(min(squared, 1.0))


def bures_distance(a: GaussianSnapshot, b: GaussianSnapshot):
    return math.sqrt(max(0.0, 2.0 * (1.0 - fidelity(a, b))))


def _entries(x):
    """(d11, d12, d22) from a 2x2 array-like, a CovarianceMatrix or a 3-sequence."""
    if isinstance(x, CovarianceMatrix):
        return x.s11, x.s12, x.s22
    a = np.asarray(x, dtype=float)
    if a.shape == (2, 2):
        return a[0, 0], 0.5 * (a[0, 1] + a[1, 0]), a[1, 1]
    if a.shape == (3,):
        return a[0], a[1], a[2]
    raise DomainError("covariance derivative", f"unsupported shape {a.shape}")


def _qfi_core(s11, s12, s22, d11, d12, d22, m1=0.0, m2=0.0):
    """QFI closed form on QFI-convention entries; works elementwise on arrays."""
    det = s11 * s22 - s12 * s12
    x11 = (s22 * d11 - s12 * d12) / det
    x12 = (s22 * d12 - s12 * d22) / det
    x21 = (s11 * d12 - s12 * d11) / det
    x22 = (s11 * d22 - s12 * d12) / det
    tr = x11 + x22
    tr2 = x11 * x11 + 2.0 * x12 * x21 + x22 * x22
    p2 = 1.0 / det
    dp = -0.5 * np.sqrt(p2) * tr
    pure = np.abs(det - 1.0) <= PURE_TOLERANCE
    if np.any(pure & (np.abs(dp) > PURE_TOLERANCE)):
        logger.warning(
            "purity derivative nonzero on a pure state; dropping the purity term"
        )
    with np.errstate(divide="ignore", invalid="ignore"):
        purity_term = np.where(pure, 0.0, 2.0 * dp * dp / (1.0 - p2 * p2))
    displacement = (s22 * m1 * m1 - 2.0 * s12 * m1 * m2 + s11 * m2 * m2) / det
    return tr2 / (2.0 * (1.0 + p2)) + purity_term + displacement


def _checked_qfi(f, what):
    f = np.asarray(f, dtype=float)
    if not np.all(np.isfinite(f)):
        raise NumericError(what, "non-finite QFI (singular covariance)")
    if np.any(f < -HEISENBERG_TOLERANCE * np.maximum(1.0, np.abs(f))):
        raise ConsistencyError(what, f"negative QFI {f.min()!r}")
    return np.maximum(f, 0.0)


def qfi_single_mode(cov: CovarianceMatrix, dcov, mean_deriv=(0.0, 0.0)):
    """
    QFI of a single-mode Gaussian family from its covariance, the covariance
    derivative and the mean derivative (all in the convention of cov).
    """
    d11, d12, d22 = _entries(dcov)
    m1, m2 = float(mean_deriv[0]), float(mean_deriv[1])
    if cov.convention is Convention.MOMENT:
        c = CONVENTION_SCALE
        d11, d12, d22 = d11 * c, d12 * c, d22 * c
        m1, m2 = m1 * math.sqrt(c), m2 * math.sqrt(c)
        cov = cov.to(Convention.QFI)
    f = _qfi_core(cov.s11, cov.s12, cov.s22, d11, d12, d22, m1, m2)
    return float(_checked_qfi(f, "qfi_single_mode"))


def qfi_columns(moments, derivatives):
    """QFI for rows of MomentConvention moments and their derivatives."""
    s = CONVENTION_SCALE * np.asarray(moments, dtype=float)
    d = CONVENTION_SCALE * np.asarray(derivatives, dtype=float)
    f = _qfi_core(s[:, 0], s[:, 1], s[:, 2], d[:, 0], d[:, 1], d[:, 2])
    return _checked_qfi(f, "qfi_columns")


def bures_step(f_estimate: float, target: float = BURES_TARGET):
    """Step h for which 1 - f(h) is close to target given a QFI estimate."""
    if not f_estimate > 0.0:
        raise DomainError("bures_step", f"QFI estimate must be > 0, got {f_estimate}")
    return math.sqrt(8.0 * target / f_estimate)


def qfi_bures_fd(state_at, phi0: float, h: float, tolerance: float = 1e-2):
    """
    QFI from the Bures distance between neighbouring states, 8(1 - f)/h^2.

    The pair is centred on phi0 so the leading error is O(h^2); the
    estimates at h and h/2 are Richardson-combined.
    """
    if not h > 0.0:
        raise DomainError("qfi_bures_fd", f"h must be > 0, got {h}")

    def estimate(step):
        f = fidelity(state_at(phi0 - 0.5 * step), state_at(phi0 + 0.5 * step))
        loss = 1.0 - f
        if loss <= FIDELITY_FLOOR:
            loss = 0.0
        return 8.0 * loss / (step * step)

    coarse = estimate(h)
    fine = estimate(0.5 * h)
    value = (4.0 * fine - coarse) / 3.0
    if coarse == fine:
        discrepancy = 0.0
    else:
        discrepancy = abs(coarse - fine) / max(abs(value), abs(fine), np.finfo(float).tiny)
    logger.debug(f"bures oracle h={h!r} coarse={coarse!r} fine={fine!r}")
    if discrepancy > tolerance:
        raise OracleError("qfi_bures_fd", coarse, fine, discrepancy)
    return BuresEstimate(max(value, 0.0), coarse, fine, discrepancy, h)


def squeezing_columns(moments):
    """
    Squeezing strength and angle for rows of (s11, s12, s22); the angle is
    NaN where the state is isotropic.
    """
    s = np.atleast_2d(np.asarray(moments, dtype=float))
    s11, s12, s22 = s[:, 0], s[:, 1], s[:, 2]
    det = s11 * s22 - s12 * s12
    if np.any(det <= 0.0):
        raise DomainError("squeezing_decomposition", "covariance not positive-definite")
    gamma = (s22 - s11) ** 2 + (2.0 * s12) ** 2
    root = np.sqrt(gamma)
    r = 0.5 * np.arcsinh(0.5 * np.sqrt(gamma / det))
    defined = root > ANISOTROPY_THRESHOLD * (s11 + s22)
    with np.errstate(divide="ignore", invalid="ignore"):
        x = np.where(defined, 2.0 * s12 / root, 0.0)
    excess = np.abs(x) - 1.0
    if np.any(excess > ASIN_CLAMP):
        raise NumericError("squeezing_decomposition", f"arcsin argument exceeds 1 by {excess.max()!r}")
    x = np.clip(x, -1.0, 1.0)
    tie = np.abs(s11 - s22) < TIE_TOLERANCE * np.maximum(s11, s22)
    two_phi = np.where(s11 < s22, -np.arcsin(x), np.pi + np.arcsin(x))
    two_phi = np.where(tie, -np.sign(s12) * 0.5 * np.pi, two_phi)
    phi = 0.5 * two_phi
    # reduce into (-pi/2, pi/2]
    phi = np.where(phi > 0.5 * np.pi, phi - np.pi, phi)
    phi = np.where(phi <= -0.5 * np.pi, phi + np.pi, phi)
    phi = np.where(defined, phi, np.nan)
    r = np.where(defined, r, 0.0)
    return r, phi


def squeezing_decomposition(cov: CovarianceMatrix):
    r, phi = squeezing_columns([[cov.s11, cov.s12, cov.s22]])
    angle = None if math.isnan(phi[0]) else float(phi[0])
    return SqueezingDecomposition(float(r[0]), angle, purity(cov))


def purity_columns(moments):
    """Purity for rows of MomentConvention moments."""
    s = np.atleast_2d(np.asarray(moments, dtype=float))
    det = s[:, 0] * s[:, 2] - s[:, 1] * s[:, 1]
    return np.minimum(1.0, np.sqrt(0.25 / det))


def wigner(cov: CovarianceMatrix, q: float, p: float):
    return float(wigner_grid(cov, np.array([q]), np.array([p]))[0, 0])


def wigner_grid(cov: CovarianceMatrix, q_axis, p_axis):
    """W[i, j] at (q_axis[i], p_axis[j]); physical normalization."""
    cov = cov.to(Convention.MOMENT)
    det = cov.det
    if not det > 0.0:
        raise NumericError("wigner", f"singular covariance (det = {det!r})")
    q, p = np.meshgrid(np.asarray(q_axis, dtype=float), np.asarray(p_axis, dtype=float), indexing="ij")
    quad = (cov.s22 * q * q - 2.0 * cov.s12 * q * p + cov.s11 * p * p) / det
    return np.exp(-0.5 * quad) / (2.0 * np.pi * math.sqrt(det))


def wigner_normalization(cov: CovarianceMatrix, half_width: float = 8.0, points: int = None):
    """Trapezoid integral of W over a box of half_width marginal deviations."""
    cov = cov.to(Convention.MOMENT)
    sq, sp = math.sqrt(cov.s11), math.sqrt(cov.s22)
    if points is None:
        # resolve the narrowest conditional width with at least two samples
        narrow = math.sqrt(cov.det / max(cov.s11, cov.s22))
        points = int(min(2001, max(401, math.ceil(4.0 * half_width * max(sq, sp) / narrow))))
    q_axis = np.linspace(-half_width * sq, half_width * sq, points)
    p_axis = np.linspace(-half_width * sp, half_width * sp, points)
    w = wigner_grid(cov, q_axis, p_axis)
    return float(trapezoid(trapezoid(w, p_axis, axis=1), q_axis))
