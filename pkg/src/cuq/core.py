"""Domain types for the co-decaying Bloch-vector description of an unstable qubit.

An unstable two-level system evolves under an effective Hamiltonian
H_eff = E - (i/2) Gamma with Hermitian dispersive part E and dissipative
part Gamma.  After trace normalisation the state is a 2x2 density matrix
rho = (1 + b.sigma)/2 parameterised by a real 3-vector b with |b| <= 1
(the co-decaying Bloch vector).  In dimensionless time tau = |Gamma| t
the vector obeys the nonlinear master evolution equation

    db/dtau = -(1/r) e x b + gamma - (b . gamma) b

with unit vectors e = E/|E|, gamma = Gamma/|Gamma| and damping ratio
r = |Gamma| / (2 |E|).  This module holds the immutable value types and
the right-hand sides; everything here is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Tolerance for state invariants (|b| <= 1 + STATE_EPS); algebraic
# identities in the tests are held to the tighter 1e-12.
STATE_EPS = 1e-9
_UNIT_TOL = 1e-12

SIGMA = np.array(
    [
        [[0.0, 1.0], [1.0, 0.0]],
        [[0.0, -1.0j], [1.0j, 0.0]],
        [[1.0, 0.0], [0.0, -1.0]],
    ],
    dtype=complex,
)
IDENTITY2 = np.eye(2, dtype=complex)


def _as_vec3(x) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected a real 3-vector, got shape {v.shape}")
    return v


@dataclass(frozen=True)
class BlochState:
    """Co-decaying Bloch vector b at dimensionless time tau = |Gamma| t."""

    b: np.ndarray
    tau: float = 0.0
    eps: float = STATE_EPS

    def __post_init__(self):
        object.__setattr__(self, "b", _as_vec3(self.b))
        if self.tau < 0.0:
            raise ValueError(f"tau must be >= 0, got {self.tau}")
        if np.linalg.norm(self.b) > 1.0 + self.eps:
            raise ValueError(f"|b| = {np.linalg.norm(self.b)} exceeds 1 + eps")

    @property
    def magnitude(self) -> float:
        return float(np.linalg.norm(self.b))

    def clamped(self) -> "BlochState":
        """Rescale onto the unit sphere if |b| drifted slightly above 1.

        Only for output boundaries; never used inside the integrator.
        """
        m = self.magnitude
        if m > 1.0:
            return BlochState(self.b / m, self.tau, self.eps)
        return self


@dataclass(frozen=True)
class QubitModel:
    """Effective-Hamiltonian decomposition over the Pauli basis.

    e and gamma are the unit energy and decay directions, r = |Gamma|/(2|E|)
    and E_mag = |E| in 1/ps.  The trace parts E0, Gamma0 are metadata only:
    they drop out of the normalised dynamics.
    """

    e: np.ndarray
    gamma: np.ndarray
    r: float
    E_mag: float = 1.0
    E0: float | None = None
    Gamma0: float | None = None

    def __post_init__(self):
        e = _as_vec3(self.e)
        g = _as_vec3(self.gamma)
        if abs(np.linalg.norm(e) - 1.0) > _UNIT_TOL:
            raise ValueError("e must be a unit vector")
        if abs(np.linalg.norm(g) - 1.0) > _UNIT_TOL:
            raise ValueError("gamma must be a unit vector")
        object.__setattr__(self, "e", e)
        object.__setattr__(self, "gamma", g)
        if not self.r > 0.0:
            raise ValueError(f"r must be positive, got {self.r}")
        if not self.E_mag > 0.0:
            raise ValueError(f"E_mag must be positive, got {self.E_mag}")

    @property
    def Gamma_mag(self) -> float:
        """|Gamma| = 2 r |E| in 1/ps."""
        return 2.0 * self.r * self.E_mag

    @property
    def theta_eg(self) -> float:
        """Angle between e and gamma in radians, in [0, pi]."""
        return float(np.arccos(np.clip(np.dot(self.e, self.gamma), -1.0, 1.0)))

    @property
    def e_cross_gamma(self) -> np.ndarray:
        return np.cross(self.e, self.gamma)

    @classmethod
    def from_angle(cls, r: float, theta_eg: float, E_mag: float = 1.0,
                   degrees: bool = False, **kw) -> "QubitModel":
        """Build a model in the CPT basis: e along x, gamma in the x-y plane.

        For theta_eg = 90 deg this puts e x gamma on the +z axis, so the
        third Bloch component is the flavour asymmetry.
        """
        th = np.radians(theta_eg) if degrees else float(theta_eg)
        e = np.array([1.0, 0.0, 0.0])
        g = np.array([np.cos(th), np.sin(th), 0.0])
        return cls(e=e, gamma=g, r=r, E_mag=E_mag, **kw)


@dataclass(frozen=True)
class DensityMatrix:
    """Trace-normalised 2x2 density matrix."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError("density matrix must be 2x2")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise ValueError("density matrix must be Hermitian")
        if abs(np.trace(m).real - 1.0) > 1e-12:
            raise ValueError("normalised density matrix must have unit trace")
        ev = np.linalg.eigvalsh(m)
        if ev.min() < -STATE_EPS or ev.max() > 1.0 + STATE_EPS:
            raise ValueError(f"eigenvalues {ev} outside [0, 1]")
        object.__setattr__(self, "entries", m)

    @property
    def bloch_vector(self) -> np.ndarray:
        return np.array([np.trace(self.entries @ SIGMA[i]).real for i in range(3)])

    @property
    def purity(self) -> float:
        return float(np.trace(self.entries @ self.entries).real)


def bloch_derivative(state: BlochState, model: QubitModel) -> np.ndarray:
    """db/dtau = -(1/r) e x b + gamma - (b.gamma) b."""
    b = state.b
    return (-np.cross(model.e, b) / model.r
            + model.gamma - np.dot(b, model.gamma) * b)


def purity_rate(state: BlochState, model: QubitModel) -> float:
    """d|b|^2/dtau = 2 (gamma.b) (1 - |b|^2)."""
    b = state.b
    return 2.0 * float(np.dot(model.gamma, b)) * (1.0 - float(np.dot(b, b)))


def density_from_bloch(state: BlochState) -> DensityMatrix:
    """rho = (1 + b.sigma)/2.  Rejects |b| > 1 + eps."""
    b = state.b
    if np.linalg.norm(b) > 1.0 + state.eps:
        raise ValueError("Bloch vector outside the unit ball")
    m = 0.5 * (IDENTITY2 + np.einsum("i,ijk->jk", b, SIGMA))
    return DensityMatrix(m)


def _effective_matrices(model: QubitModel) -> tuple[np.ndarray, np.ndarray]:
    """E and Gamma rebuilt over the Pauli basis, in units of |Gamma|."""
    gm = model.Gamma_mag
    e0 = (model.E0 or 0.0) / gm
    g0 = (model.Gamma0 or 0.0) / gm
    E = e0 * IDENTITY2 - np.einsum("i,ijk->jk", model.e, SIGMA) / (2.0 * model.r)
    G = g0 * IDENTITY2 - np.einsum("i,ijk->jk", model.gamma, SIGMA)
    return E, G


def density_evolution_rhs(rho: DensityMatrix, model: QubitModel) -> np.ndarray:
    """d(rho)/dtau = -i[E, rho] - (1/2){Gamma, rho} + rho Tr(rho Gamma).

    Evaluated in units of |Gamma| (dimensionless time), so its Pauli
    decomposition coincides with `bloch_derivative`.  The trace parts E0,
    Gamma0 cancel identically; the result is traceless.
    """
    m = rho.entries
    E, G = _effective_matrices(model)
    return (-1j * (E @ m - m @ E)
            - 0.5 * (G @ m + m @ G)
            + m * np.trace(m @ G))
