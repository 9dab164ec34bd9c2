"""Closed-form results for critical unstable qubits.

Covers the exact pure-state solution on the plane spanned by the decay
direction and its normal (angle, period, projections), the asymptotic
states of the general geometry, the magnitude of an initially fully
mixed state, and the elliptical trajectory it traces out.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import QubitModel

__all__ = [
    "CuqClock",
    "AsymptoticState",
    "AsymptoticBranch",
    "MixedEllipse",
    "cuq_clock",
    "restore_units",
    "cuq_theta",
    "cuq_projections",
    "asymptotic_state",
    "mixed_magnitude",
    "mixed_magnitude_vs_angle",
    "mixed_ellipse",
    "polar_rates",
    "half_angle_slope",
]

# branch-dispatch thresholds for the asymptotic state: 1/sin^2 is
# ill-conditioned near alignment, 1/alpha near perpendicularity
_ALIGN_TOL = 1e-10


def _check_r_oscillatory(r: float):
    if not (0.0 < r < 1.0):
        raise ValueError(f"r must be in (0, 1) for an oscillating qubit, got {r}")


@dataclass(frozen=True)
class CuqClock:
    """Dimensionless oscillation period and angular frequency."""

    r: float
    P_hat: float
    omega_hat: float


def cuq_clock(r: float) -> CuqClock:
    """P_hat = 2 pi r / sqrt(1 - r^2) and omega_hat = 2 pi / P_hat."""
    _check_r_oscillatory(r)
    root = np.sqrt(1.0 - r * r)
    return CuqClock(r=r, P_hat=2.0 * np.pi * r / root, omega_hat=root / r)


def restore_units(r: float, E_mag: float) -> tuple[float, float]:
    """Physical period [ps] and angular frequency [1/ps].

    P = pi / (|E| sqrt(1 - r^2)), omega = 2 |E| sqrt(1 - r^2).
    """
    _check_r_oscillatory(r)
    if not E_mag > 0.0:
        raise ValueError("E_mag must be positive")
    root = np.sqrt(1.0 - r * r)
    return np.pi / (E_mag * root), 2.0 * E_mag * root


def half_angle_slope(r: float) -> float:
    """(1 - sqrt(1 - r^2)) / r, evaluated cancellation-free as r/(1 + sqrt(1-r^2)).

    The geometric ratio of consecutive Fourier coefficients; finite as r -> 0.
    """
    if not (0.0 <= r < 1.0):
        raise ValueError(f"r must be in [0, 1), got {r}")
    return r / (1.0 + np.sqrt(1.0 - r * r))


def cuq_theta(tau, r: float):
    """Continuous, unwrapped angle theta(tau) with theta(0) = 0.

    Solves d(theta)/dtau = -1/r - cos(theta) via the tangent half-angle
    inversion; theta decreases by 2 pi every period.
    """
    _check_r_oscillatory(r)
    clock = cuq_clock(r)
    tau = np.asarray(tau, dtype=float)
    scalar = tau.ndim == 0
    t = np.atleast_1d(tau)
    m = np.floor(t / clock.P_hat + 0.5)
    frac = t - m * clock.P_hat  # in [-P/2, P/2)
    amp = np.sqrt((1.0 + r) / (1.0 - r))
    half = clock.omega_hat * frac / 2.0
    theta = np.where(
        np.isclose(np.abs(frac), clock.P_hat / 2.0, rtol=0.0, atol=1e-15),
        -np.pi * np.sign(frac + 1e-300),
        2.0 * np.arctan(-amp * np.tan(half)),
    ) - 2.0 * np.pi * m
    return float(theta[0]) if scalar else theta


def cuq_projections(tau, r: float):
    """(b.gamma, b.(e x gamma)) of the pure reference solution.

    b.gamma       = sqrt(1-r^2) sin(w tau) / (1 - r cos(w tau))
    b.(e x gamma) = (cos(w tau) - r) / (1 - r cos(w tau))
    """
    _check_r_oscillatory(r)
    w = cuq_clock(r).omega_hat
    tau = np.asarray(tau, dtype=float)
    denom = 1.0 - r * np.cos(w * tau)
    b_gamma = np.sqrt(1.0 - r * r) * np.sin(w * tau) / denom
    b_exg = (np.cos(w * tau) - r) / denom
    return b_gamma, b_exg


class AsymptoticBranch(Enum):
    GENERAL = "general"
    ALIGNED = "aligned"
    PERPENDICULAR_OVERDAMPED = "perpendicular-overdamped"
    CRITICAL_NO_STATIONARY = "critical-no-stationary"


@dataclass(frozen=True)
class AsymptoticState:
    b_star: np.ndarray | None
    alpha: float
    branch: AsymptoticBranch


def asymptotic_state(model: QubitModel) -> AsymptoticState:
    """Stationary Bloch vector of the master evolution equation, by geometry.

    General geometry: b* = alpha e - (1-alpha^2)/(s^2 r) e x gamma
    - c (1-alpha^2)/(s^2 alpha) e x (e x gamma) with
    alpha = sign(c)/sqrt(2) sqrt(1 - r^2 + sqrt((1-r^2)^2 + 4 c^2 r^2)).
    Aligned: b* = sign(c) e.  Perpendicular: b* exists only for r >= 1;
    for r < 1 there is no stationary state (Hopf bifurcation at r = 1).
    """
    e, g, r = model.e, model.gamma, model.r
    c = float(np.dot(e, g))
    exg = np.cross(e, g)
    s2 = float(np.dot(exg, exg))  # sin^2(theta_eg)

    if s2 < _ALIGN_TOL:
        sign = 1.0 if c >= 0.0 else -1.0
        return AsymptoticState(b_star=sign * e, alpha=sign,
                               branch=AsymptoticBranch.ALIGNED)
    if abs(c) < _ALIGN_TOL:
        if r < 1.0:
            return AsymptoticState(b_star=None, alpha=float("nan"),
                                   branch=AsymptoticBranch.CRITICAL_NO_STATIONARY)
        b = (np.sqrt(r * r - 1.0) / r) * g - exg / r
        return AsymptoticState(b_star=b, alpha=float(np.dot(b, e)),
                               branch=AsymptoticBranch.PERPENDICULAR_OVERDAMPED)

    one_m_r2 = 1.0 - r * r
    alpha = (np.sign(c) / np.sqrt(2.0)
             * np.sqrt(one_m_r2 + np.sqrt(one_m_r2 ** 2 + 4.0 * c * c * r * r)))
    exexg = np.cross(e, exg)
    b = (alpha * e
         - (1.0 - alpha * alpha) / (s2 * r) * exg
         - c * (1.0 - alpha * alpha) / (s2 * alpha) * exexg)
    return AsymptoticState(b_star=b, alpha=float(alpha),
                           branch=AsymptoticBranch.GENERAL)


def mixed_magnitude(tau, r: float):
    """|b(tau)| for a fully mixed start b(0) = 0, with e perpendicular to gamma.

    r < 1: |b|^2 = 1 - (1-r^2)^2 [1 - r^2 cos(sqrt(1-r^2) tau / r)]^{-2}
    r = 1: |b|^2 = 1 - 4 / (2 + tau^2)^2
    """
    if not (0.0 < r <= 1.0):
        raise ValueError(f"r must be in (0, 1], got {r}")
    tau = np.asarray(tau, dtype=float)
    if r == 1.0:
        mag2 = 1.0 - 4.0 / (2.0 + tau * tau) ** 2
    else:
        one_m_r2 = 1.0 - r * r
        denom = 1.0 - r * r * np.cos(np.sqrt(one_m_r2) * tau / r)
        mag2 = 1.0 - one_m_r2 ** 2 / denom ** 2
    return np.sqrt(np.clip(mag2, 0.0, None))


def mixed_magnitude_vs_angle(phi, r: float):
    """|b| = -2 r sin(phi) / (1 + r^2 sin^2 phi) on the lower half-plane branch.

    Defined for phi with sin(phi) <= 0 (the fully mixed trajectory sweeps
    only the lower half-plane); raises for queries off that branch.
    """
    _check_r_oscillatory(r)
    phi = np.asarray(phi, dtype=float)
    s = np.sin(phi)
    if np.any(s > 1e-12):
        raise ValueError("phi is outside the lower half-plane branch "
                         "(the formula would be negative)")
    return -2.0 * r * s / (1.0 + r * r * s * s)


@dataclass(frozen=True)
class MixedEllipse:
    """Ellipse traced by the fully mixed trajectory, centred on the
    e x gamma axis at -r/(1+r^2)."""

    r: float
    semi_major: float   # along gamma
    semi_minor: float   # along e x gamma
    eccentricity: float

    @property
    def center_offset(self) -> float:
        return -self.r / (1.0 + self.r * self.r)


def mixed_ellipse(r: float) -> MixedEllipse:
    """Semi-axes r/sqrt(1+r^2), r/(1+r^2) and eccentricity r/sqrt(1+r^2)."""
    _check_r_oscillatory(r)
    one_p = 1.0 + r * r
    return MixedEllipse(
        r=r,
        semi_major=r / np.sqrt(one_p),
        semi_minor=r / one_p,
        eccentricity=r / np.sqrt(one_p),
    )


def polar_rates(b_mag: float, phi: float, r: float) -> tuple[float, float]:
    """(d|b|/dtau, d phi/dtau) of the planar polar representation.

    d|b|/dtau = (1 - |b|^2) cos(phi);  d phi/dtau = -1/r - sin(phi)/|b|.
    The angular rate is singular at |b| = 0 (use the Cartesian form there).
    """
    if not (0.0 < b_mag <= 1.0):
        raise ValueError(f"|b| must be in (0, 1], got {b_mag}")
    db = (1.0 - b_mag * b_mag) * np.cos(phi)
    dphi = -1.0 / r - np.sin(phi) / b_mag
    return float(db), float(dphi)
