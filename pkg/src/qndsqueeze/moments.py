"""Mean/covariance bookkeeping for collective atomic and Stokes pseudospins.

Component order is (x, y, z) for both the atomic spin F and the light Stokes
vector S. Rotations about z use

    R_z(theta) = [[cos, sin, 0], [-sin, cos, 0], [0, 0, 1]]

and operator-valued angles are propagated to lowest order in the coupling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

ATOMS = "atoms"

# S_dx = S_z, S_dy = -S_x, S_dz = -S_y
BEAMSPLITTER = np.array([[0.0, 0.0, 1.0],
                         [-1.0, 0.0, 0.0],
                         [0.0, -1.0, 0.0]])


@dataclass(frozen=True)
class MomentState:
    label: str
    mean: np.ndarray
    cov: np.ndarray
    number: float

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(3)
        cov = np.asarray(self.cov, dtype=float).reshape(3, 3)
        if not np.allclose(cov, cov.T, rtol=1e-12, atol=1e-12 * max(1.0, np.abs(cov).max())):
            raise ValueError("covariance must be symmetric")
        if np.any(np.diag(cov) < 0):
            raise ValueError("variances must be non-negative")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", 0.5 * (cov + cov.T))

    @property
    def is_light(self) -> bool:
        return self.label != ATOMS

    def variance(self, axis: int | str) -> float:
        i = "xyz".index(axis) if isinstance(axis, str) else axis
        return float(self.cov[i, i])


def css_atoms(n_at: float) -> MomentState:
    """Coherent spin state along +y: <F_y> = N/2, Var F_x = Var F_z = N/4."""
    if n_at < 0:
        raise ValueError("atom number must be non-negative")
    return MomentState(ATOMS, [0.0, n_at / 2, 0.0], np.diag([n_at / 4, 0.0, n_at / 4]), n_at)


def css_light(n_ph: float, x_sign: int = 1, label: str = "light") -> MomentState:
    """Coherent light split equally between the arms: <S_x> = +-N/2, all variances N/4."""
    if n_ph < 0:
        raise ValueError("photon number must be non-negative")
    if x_sign not in (1, -1):
        raise ValueError("x_sign must be +1 or -1")
    return MomentState(label, [x_sign * n_ph / 2, 0.0, 0.0], np.eye(3) * n_ph / 4, n_ph)


@dataclass(frozen=True)
class RotationAngle:
    """theta = offset + sum_k c_k O_k for operators O_k of *other* subsystems.

    ``sources`` maps operator names to (mean, variance); the operators are
    taken as mutually uncorrelated and uncorrelated with the rotated state.
    """

    offset: float = 0.0
    coefficients: Mapping[str, float] = field(default_factory=dict)
    sources: Mapping[str, tuple[float, float]] = field(default_factory=dict)

    def __post_init__(self):
        missing = set(self.coefficients) - set(self.sources)
        if missing:
            raise ValueError(f"no moments given for {sorted(missing)}")
        if any(var < 0 for _, var in self.sources.values()):
            raise ValueError("source variances must be non-negative")

    @property
    def mean(self) -> float:
        return self.offset + sum(c * self.sources[k][0] for k, c in self.coefficients.items())

    @property
    def variance(self) -> float:
        names = list(self.coefficients)
        c = np.array([self.coefficients[k] for k in names])
        cov = np.diag([self.sources[k][1] for k in names])
        return float(c @ cov @ c) if names else 0.0

    @classmethod
    def constant(cls, theta: float) -> "RotationAngle":
        return cls(offset=theta)


def rotation_z(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, s, 0.0], [-s, c, 0.0], [0.0, 0.0, 1.0]])


def _rotation_z_derivative(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[-s, c, 0.0], [-c, -s, 0.0], [0.0, 0.0, 0.0]])


def rotate_z(state: MomentState, angle: RotationAngle) -> MomentState:
    """Rotate about z by an operator-valued angle.

    The mean is rotated by <theta>; the angle noise enters as
    Var(theta) g g^T with g = dR/dtheta <X>, i.e. terms beyond second order in
    the coupling are dropped.
    """
    variance = angle.variance
    if not np.isfinite(variance):
        raise ValueError("rotation angle variance must be finite")
    theta = angle.mean
    R = rotation_z(theta)
    g = _rotation_z_derivative(theta) @ state.mean
    cov = R @ state.cov @ R.T + variance * np.outer(g, g)
    return MomentState(state.label, R @ state.mean, cov, state.number)


def output_beamsplitter(state: MomentState, inverse: bool = False) -> MomentState:
    """Map internal Stokes components to the interferometer output ports."""
    if not state.is_light:
        raise ValueError("the output beamsplitter acts on light fields only")
    M = BEAMSPLITTER.T if inverse else BEAMSPLITTER
    return MomentState(state.label, M @ state.mean, M @ state.cov @ M.T, state.number)
