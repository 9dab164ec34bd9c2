"""Adaptive integration of the master evolution equation.

A Dormand-Prince 5(4) embedded pair with a PI step-size controller and
cubic Hermite dense output.  This integrator is the numerical oracle the
closed-form results are validated against, so it deliberately shares no
code with the analytic module.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import BlochState, QubitModel, bloch_derivative

__all__ = [
    "Trajectory",
    "StepSizeUnderflow",
    "NON_CONVERGENT",
    "evolve",
    "evolve_to_asymptote",
]


class StepSizeUnderflow(RuntimeError):
    """Step size collapsed below machine resolution (stiff/singular model)."""


class _NonConvergent:
    """Sentinel: the state keeps oscillating and never settles."""

    def __repr__(self):
        return "NON_CONVERGENT"

    def __bool__(self):
        return False


NON_CONVERGENT = _NonConvergent()

# Dormand-Prince 5(4) tableau.  b5 propagates; b5 - b4 is the error weight.
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


@dataclass
class Trajectory:
    """Accepted integration steps plus dense-output interpolation."""

    model: QubitModel
    taus: np.ndarray
    bs: np.ndarray       # shape (n, 3)
    derivs: np.ndarray   # db/dtau at the sample points, for Hermite interpolation
    controller_stats: dict = field(default_factory=dict)

    @property
    def samples(self) -> list[BlochState]:
        # loosened eps: accepted steps may overshoot |b| = 1 by the local error
        eps = max(1e-9, 10.0 * self.controller_stats.get("rel_tol", 1e-9))
        return [BlochState(b, t, eps=eps) for t, b in zip(self.taus, self.bs)]

    @property
    def final(self) -> np.ndarray:
        return self.bs[-1]

    def interpolate(self, tau) -> np.ndarray:
        """Cubic Hermite interpolation between accepted steps."""
        tau = np.asarray(tau, dtype=float)
        scalar = tau.ndim == 0
        t = np.atleast_1d(tau)
        if t.min() < self.taus[0] - 1e-12 or t.max() > self.taus[-1] + 1e-12:
            raise ValueError("interpolation query outside the integrated range")
        idx = np.clip(np.searchsorted(self.taus, t, side="right") - 1,
                      0, len(self.taus) - 2)
        t0 = self.taus[idx]
        h = self.taus[idx + 1] - t0
        s = np.clip((t - t0) / h, 0.0, 1.0)[:, None]
        y0, y1 = self.bs[idx], self.bs[idx + 1]
        f0, f1 = self.derivs[idx], self.derivs[idx + 1]
        h = h[:, None]
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s * s * (3 - 2 * s)
        h11 = s * s * (s - 1)
        out = h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1
        return out[0] if scalar else out

    def magnitudes(self) -> np.ndarray:
        return np.linalg.norm(self.bs, axis=1)


def _rhs(model: QubitModel):
    e, g, r = model.e, model.gamma, model.r

    def f(b: np.ndarray) -> np.ndarray:
        return -np.cross(e, b) / r + g - np.dot(b, g) * b

    return f


def _max_step(model: QubitModel) -> float:
    h = np.inf
    if model.r < 1.0:
        # resolve oscillations: >= 64 samples per dimensionless period
        period = 2.0 * np.pi * model.r / np.sqrt(1.0 - model.r ** 2)
        h = period / 64.0
    if model.r < 0.05:
        # the 1/r rotation term dominates; cap on the rotation scale itself
        h = min(h, 2.0 * np.pi * model.r / 32.0)
    return h


def evolve(model: QubitModel, b0, tau_end: float,
           rel_tol: float = 1e-9, abs_tol: float = 1e-12) -> Trajectory:
    """Integrate db/dtau from b0 over [0, tau_end]."""
    if not tau_end > 0.0:
        raise ValueError("tau_end must be positive")
    for tol in (rel_tol, abs_tol):
        if not (0.0 < tol <= 1e-2):
            raise ValueError(f"tolerance {tol} outside (0, 1e-2]")
    b = np.asarray(b0, dtype=float).copy()
    if b.shape != (3,):
        raise ValueError("b0 must be a 3-vector")

    f = _rhs(model)
    h_max = min(_max_step(model), tau_end)
    k = np.empty((7, 3))
    k[0] = f(b)

    # conservative initial step from the rhs scale
    scale = abs_tol + rel_tol * max(np.linalg.norm(b), 1.0)
    d1 = np.linalg.norm(k[0])
    h = min(h_max, 0.01 * scale / d1 if d1 > 0 else h_max, 0.1)

    taus = [0.0]
    bs = [b.copy()]
    ders = [k[0].copy()]
    tau = 0.0
    n_acc = n_rej = 0
    nfev = 1
    max_err = 0.0
    err_prev = 1.0
    # PI controller exponents for a 5th-order propagating pair
    k_i, k_p = 0.7 / 5.0, 0.4 / 5.0

    while tau < tau_end:
        h = min(h, tau_end - tau, h_max)
        if h < 1e-14 * max(1.0, tau):
            raise StepSizeUnderflow(f"step underflow at tau={tau}")
        for i in range(1, 7):
            k[i] = f(b + h * (_A[i] @ k[:i]))
        nfev += 6
        y5 = b + h * (_B5 @ k)
        err_vec = h * (_E @ k)
        sc = abs_tol + rel_tol * np.maximum(np.abs(b), np.abs(y5))
        err = np.sqrt(np.mean((err_vec / sc) ** 2))
        if err <= 1.0:
            tau += h
            b = y5
            k[0] = k[6]  # FSAL
            taus.append(tau)
            bs.append(b.copy())
            ders.append(k[6].copy())
            n_acc += 1
            max_err = max(max_err, err)
            fac = 0.9 * (err + 1e-16) ** (-k_i) * (err_prev + 1e-16) ** k_p
            err_prev = max(err, 1e-16)
            h *= min(5.0, max(0.2, fac))
        else:
            n_rej += 1
            h *= max(0.2, 0.9 * err ** (-0.2))

    stats = {
        "n_accepted": n_acc,
        "n_rejected": n_rej,
        "n_fev": nfev,
        "max_local_error": max_err,
        "rel_tol": rel_tol,
        "abs_tol": abs_tol,
    }
    return Trajectory(model=model, taus=np.array(taus), bs=np.array(bs),
                      derivs=np.array(ders), controller_stats=stats)


def evolve_to_asymptote(model: QubitModel, b0, settle_tol: float = 1e-8,
                        max_tau: float = 1e4):
    """Integrate until db/dtau stays below settle_tol over one tau-unit.

    Returns the settled Bloch vector, or NON_CONVERGENT when the running
    peak of |db/dtau| fails to decay by 1% over 10 estimated periods (the
    persistent-oscillation signature of a critical unstable qubit).
    """
    if not settle_tol > 0.0:
        raise ValueError("settle_tol must be positive")
    if model.r < 1.0:
        period = 2.0 * np.pi * model.r / np.sqrt(1.0 - model.r ** 2)
    else:
        period = 2.0 * np.pi * model.r  # rotation scale; no true period
    window = max(period, 1.0)

    b = np.asarray(b0, dtype=float)
    tau = 0.0
    peaks: list[float] = []
    recent: list[tuple[float, float]] = []  # (tau, |db/dtau|)

    while tau < max_tau:
        chunk = min(window, max_tau - tau)
        traj = evolve(model, b, chunk, rel_tol=1e-10, abs_tol=1e-13)
        speeds = np.linalg.norm(traj.derivs, axis=1)
        for dt, sp in zip(traj.taus, speeds):
            recent.append((tau + dt, sp))
        tau += traj.taus[-1]
        b = traj.final
        recent = [(t, sp) for t, sp in recent if t >= tau - 1.0]
        if recent and max(sp for _, sp in recent) < settle_tol and tau >= 1.0:
            return b
        peaks.append(float(speeds.max()))
        if len(peaks) >= 10 and peaks[-1] > 0.99 * peaks[-10]:
            return NON_CONVERGENT
    raise RuntimeError(f"no classification reached by max_tau={max_tau}")
