"""Fourier spectrum of the oscillation signal and its inversion to r.

The pure reference oscillation has closed-form coefficients

    c_n = 2 sqrt(1-r^2)/r * q^n,   q = (1 - sqrt(1-r^2)) / r,

identical for the odd (b.gamma, sine) and even (b.(e x gamma), cosine)
series except for the even constant term d_0 = -q.  The geometric
progression makes consecutive-coefficient ratios observables that invert
to the damping ratio r.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad

from .analytic import half_angle_slope

__all__ = [
    "SeriesKind",
    "FourierSpectrum",
    "AnharmonicityEstimate",
    "closed_form_cn",
    "closed_form_d0",
    "closed_form_spectrum",
    "quadrature_spectrum",
    "anharmonicity",
    "r_from_anharmonicity",
    "correct_effective_r",
]


class SeriesKind(Enum):
    ODD = "odd"    # sin(n w tau) series of b.gamma
    EVEN = "even"  # d0 + cos(n w tau) series of b.(e x gamma)


@dataclass(frozen=True)
class FourierSpectrum:
    """d0 plus coefficients for n = 1..N, optionally with 1-sigma errors."""

    d0: float
    coeffs: np.ndarray
    kind: SeriesKind
    d0_err: float = 0.0
    coeff_errs: np.ndarray | None = None

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=float))
        if self.coeff_errs is not None:
            errs = np.asarray(self.coeff_errs, dtype=float)
            if errs.shape != self.coeffs.shape:
                raise ValueError("coefficient errors must match coefficients")
            object.__setattr__(self, "coeff_errs", errs)

    def coefficient(self, n: int) -> float:
        """Coefficient of order n (n = 0 returns d0)."""
        if n == 0:
            return self.d0
        return float(self.coeffs[n - 1])

    def coefficient_err(self, n: int) -> float:
        if n == 0:
            return self.d0_err
        if self.coeff_errs is None:
            return 0.0
        return float(self.coeff_errs[n - 1])

    @property
    def order(self) -> int:
        return len(self.coeffs)


def closed_form_cn(n: int, r: float) -> float:
    """c_n = 2 (sqrt(1-r^2)/r) q^n, finite as r -> 0 (leading order r^{n-1})."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (0.0 <= r < 1.0):
        raise ValueError(f"r must be in [0, 1), got {r}")
    q = half_angle_slope(r)
    if r == 0.0:
        return 1.0 if n == 1 else 0.0
    return 2.0 * np.sqrt(1.0 - r * r) / r * q ** n


def closed_form_d0(r: float) -> float:
    """Constant term of the even series: d0 = -(1 - sqrt(1-r^2))/r."""
    if not (0.0 <= r < 1.0):
        raise ValueError(f"r must be in [0, 1), got {r}")
    return -half_angle_slope(r)


def closed_form_spectrum(r: float, N: int, kind: SeriesKind = SeriesKind.EVEN
                         ) -> FourierSpectrum:
    """Exact spectrum of the pure reference oscillation through order N."""
    coeffs = np.array([closed_form_cn(n, r) for n in range(1, N + 1)])
    d0 = closed_form_d0(r) if kind is SeriesKind.EVEN else 0.0
    return FourierSpectrum(d0=d0, coeffs=coeffs, kind=kind)


def quadrature_spectrum(signal: Callable[[float], float], P_hat: float,
                        N: int, kind: SeriesKind) -> FourierSpectrum:
    """Fourier coefficients of a P_hat-periodic signal by adaptive quadrature.

    d0 carries prefactor 1/P_hat, every n >= 1 carries 2/P_hat.  The period
    is split into panels (>= 8; the integrands peak sharply near half
    period as r -> 1) and each panel integrated to 1e-12 absolute.
    """
    if N > 64:
        raise ValueError("N must be <= 64")
    half = P_hat / 2.0
    mismatch = abs(signal(-half) - signal(half))
    if mismatch > 1e-6:
        raise ValueError(f"signal is not P_hat-periodic "
                         f"(endpoint mismatch {mismatch:.3e})")

    def integrate(f) -> float:
        panels = max(8, 2 * N)
        edges = np.linspace(-half, half, panels + 1)
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            val, _ = quad(f, lo, hi, epsabs=1e-12, epsrel=1e-12, limit=200)
            total += val
        return total

    w = 2.0 * np.pi / P_hat
    d0 = integrate(signal) / P_hat
    coeffs = np.empty(N)
    for n in range(1, N + 1):
        if kind is SeriesKind.ODD:
            f = lambda t, n=n: signal(t) * np.sin(n * w * t)
        else:
            f = lambda t, n=n: signal(t) * np.cos(n * w * t)
        coeffs[n - 1] = 2.0 / P_hat * integrate(f)
    return FourierSpectrum(d0=d0, coeffs=coeffs, kind=kind)


@dataclass(frozen=True)
class AnharmonicityEstimate:
    """Ratio of consecutive coefficients with its propagated uncertainty."""

    ratio: float
    ratio_err: float
    order_n: int
    kind: SeriesKind
    reliable: bool = True
    r_hat: float = float("nan")
    r_err: float = float("nan")

    def with_r(self, r: float, r_err: float) -> "AnharmonicityEstimate":
        return AnharmonicityEstimate(self.ratio, self.ratio_err, self.order_n,
                                     self.kind, self.reliable, r, r_err)


def anharmonicity(spectrum: FourierSpectrum, n: int) -> AnharmonicityEstimate:
    """Anharmonicity factor of order n.

    Odd series: C_n = c_{n+1}/c_n for n >= 1.  Even series: D_n =
    d_{n+1}/d_n for n >= 0 (the constant d0 is a legal denominator).
    A denominator consistent with zero flags the ratio unreliable.
    """
    if spectrum.kind is SeriesKind.ODD and n < 1:
        raise ValueError("odd-series anharmonicity needs n >= 1")
    if n < 0:
        raise ValueError("n must be >= 0")
    if n + 1 > spectrum.order:
        raise ValueError(f"spectrum only holds coefficients through "
                         f"n = {spectrum.order}")
    num, den = spectrum.coefficient(n + 1), spectrum.coefficient(n)
    num_err, den_err = spectrum.coefficient_err(n + 1), spectrum.coefficient_err(n)
    reliable = abs(den) > den_err
    if den == 0.0:
        return AnharmonicityEstimate(float("inf"), float("inf"), n,
                                     spectrum.kind, reliable=False)
    ratio = num / den
    # first-order (delta-method) propagation; coefficients treated independent
    err = np.hypot(num_err / den, num * den_err / den ** 2)
    est = AnharmonicityEstimate(float(ratio), float(err), n, spectrum.kind,
                                reliable=reliable)
    r, r_err = r_from_anharmonicity(est)
    return est.with_r(r, r_err)


def r_from_anharmonicity(est: AnharmonicityEstimate) -> tuple[float, float]:
    """Invert an anharmonicity ratio to the damping ratio r.

    C_n or D_n (n >= 1):  r = 2 rho / (rho^2 + 1)
    D_0:                  r = 1 / sqrt(1 + rho^2 / 4)
    with rho = |ratio|; signs are reported separately on the estimate.
    """
    rho = abs(est.ratio)
    if est.kind is SeriesKind.EVEN and est.order_n == 0:
        if np.isinf(rho):
            return 0.0, 0.0 if est.ratio_err == 0 else float("nan")
        r = 1.0 / np.sqrt(1.0 + rho * rho / 4.0)
        drdrho = -(rho / 4.0) * (1.0 + rho * rho / 4.0) ** -1.5
    else:
        if np.isinf(rho):
            return 0.0, float("nan")
        r = 2.0 * rho / (rho * rho + 1.0)
        drdrho = 2.0 * (1.0 - rho * rho) / (rho * rho + 1.0) ** 2
    return float(r), float(abs(drdrho) * est.ratio_err)


def correct_effective_r(r_tilde: float, amplitude_R: float) -> float:
    """Map the effective ratio of a reduced-amplitude oscillation to true r.

    r = r_tilde / sqrt(R^2 + r_tilde^2 (1 - R^2)), where R is the amplitude
    of the signal's projection along the decay direction.
    """
    if not (0.0 <= r_tilde <= 1.0):
        raise ValueError(f"r_tilde must be in [0, 1], got {r_tilde}")
    if not (0.0 < amplitude_R <= 1.0):
        raise ValueError(f"amplitude R must be in (0, 1], got {amplitude_R}")
    return r_tilde / np.sqrt(amplitude_R ** 2
                             + r_tilde ** 2 * (1.0 - amplitude_R ** 2))
