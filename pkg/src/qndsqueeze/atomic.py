"""Atomic line data, dispersive coupling and the geometry -> (d, eta, kappa^2) mapping.

Frequencies are angular (rad/s). Optical frequencies ``omega`` are offsets from
the hyperfine centre of gravity of the line, so the f -> f' transition sits at
``line.transition(f, fp)``. Detunings follow ``Delta = omega - transition``.

Line strengths in the constants table are the pi-polarized strengths of the
m_f = 0 clock states, normalized so that unit strength has the resonant cross
section ``sigma0 = lambda**2 / (2 pi)``. On the D1 line the total pi strength of
any ground sublevel is 1/3 of the closed two-level value 3 lambda^2/2pi, so the
clock states carry strength 1 on the single allowed hyperfine component
(f=3 -> f'=4 and f=4 -> f'=3; the f -> f'=f components vanish for m=0).
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

import numpy as np
from scipy import constants as sc
from scipy.optimize import brentq

GROUND_LEVELS = (3, 4)
EXCITED_LEVELS = (3, 4)

# evaluations closer than this (in units of the FWHM) to a line are rejected
POLE_EXCLUSION = 1e-3
ETA_PERTURBATIVE_LIMIT = 0.5


class ResonanceError(ValueError):
    """Raised when a frequency falls on top of an optical resonance."""


def mhz_to_rad_s(f_mhz):
    return 2.0 * np.pi * 1e6 * np.asarray(f_mhz, dtype=float)


def rad_s_to_mhz(omega):
    return np.asarray(omega, dtype=float) / (2.0 * np.pi * 1e6)


@dataclass(frozen=True)
class TransitionLine:
    wavelength: float  # m
    linewidth: float  # FWHM, rad/s
    ground_splitting: float  # rad/s
    excited_splitting: float  # rad/s
    strengths: Mapping[tuple[int, int], float]  # (f, f') -> relative pi strength
    nuclear_spin: float = 3.5
    name: str = "Cs D1"
    version: str = "unversioned"

    def __post_init__(self):
        for attr in ("wavelength", "linewidth", "ground_splitting", "excited_splitting"):
            value = getattr(self, attr)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{attr} must be positive and finite, got {value!r}")
        if any(s < 0 for s in self.strengths.values()):
            raise ValueError("line strengths must be non-negative")

    @property
    def sigma0(self) -> float:
        """Resonant cross section lambda^2 / 2 pi (m^2)."""
        return self.wavelength**2 / (2.0 * np.pi)

    @property
    def carrier(self) -> float:
        """Absolute angular frequency of the line centre of gravity."""
        return 2.0 * np.pi * sc.c / self.wavelength

    def _level_offset(self, F: int, splitting: float) -> float:
        # interval rule for J = 1/2: levels at (A/2) K, splitting = A (I + 1/2)
        I, J = self.nuclear_spin, 0.5
        A = splitting / (I + 0.5)
        K = F * (F + 1) - I * (I + 1) - J * (J + 1)
        return 0.5 * A * K

    def ground_energy(self, f: int) -> float:
        return self._level_offset(f, self.ground_splitting)

    def excited_energy(self, fp: int) -> float:
        return self._level_offset(fp, self.excited_splitting)

    def transition(self, f: int, fp: int) -> float:
        """Angular frequency of f -> f' relative to the line centre."""
        return self.excited_energy(fp) - self.ground_energy(f)

    def detuning(self, omega, f: int, fp: int):
        return np.asarray(omega, dtype=float) - self.transition(f, fp)

    def strength(self, f: int, fp: int) -> float:
        return float(self.strengths.get((f, fp), 0.0))

    def pi_strength(self, f: int) -> float:
        """Summed pi strength out of ground level f."""
        return sum(self.strength(f, fp) for fp in EXCITED_LEVELS)

    def active_transitions(self):
        return [(f, fp) for f in GROUND_LEVELS for fp in EXCITED_LEVELS if self.strength(f, fp) > 0]


def load_line(path: str | Path | None = None) -> TransitionLine:
    """Read a flat key-value constants file. Defaults to the bundled Cs D1 table."""
    if path is None:
        text = resources.files("qndsqueeze").joinpath("data/cs_d1.json").read_text()
    else:
        text = Path(path).read_text()
    raw = json.loads(text)
    two_pi = 2.0 * np.pi
    strengths = {}
    for key, value in raw.items():
        if key.startswith("pi_strength_"):
            f_part, fp_part = key[len("pi_strength_"):].split("_")
            strengths[(int(f_part[1:]), int(fp_part[2:]))] = float(value)
    return TransitionLine(
        wavelength=float(raw["wavelength_m"]),
        linewidth=two_pi * float(raw["linewidth_fwhm_hz"]),
        ground_splitting=two_pi * float(raw["ground_hyperfine_splitting_hz"]),
        excited_splitting=two_pi * float(raw["excited_hyperfine_splitting_hz"]),
        strengths=strengths,
        nuclear_spin=float(raw.get("nuclear_spin", 3.5)),
        name=raw.get("line_name", "Cs D1"),
        version=raw.get("table_version", "unversioned"),
    )


@dataclass(frozen=True)
class BeamGeometry:
    area: float  # m^2
    power: float = 0.0  # W
    pulse_duration: float | None = None  # s
    waist: float | None = None  # m, area = pi w^2

    def __post_init__(self):
        if not self.area > 0:
            raise ValueError(f"beam area must be positive, got {self.area!r}")
        if self.power < 0:
            raise ValueError("optical power must be non-negative")
        if self.pulse_duration is not None and not self.pulse_duration > 0:
            raise ValueError("pulse duration must be positive")
        if self.waist is not None and not math.isclose(self.area, np.pi * self.waist**2, rel_tol=1e-12):
            raise ValueError("area is inconsistent with the beam waist (area = pi w^2)")

    @classmethod
    def from_waist(cls, waist: float, power: float = 0.0, pulse_duration: float | None = None):
        return cls(area=np.pi * waist**2, power=power, pulse_duration=pulse_duration, waist=waist)


@dataclass(frozen=True)
class EnsembleConfig:
    n_atoms: float
    area: float  # m^2
    sigma0: float  # m^2
    density: float | None = None  # m^-3
    length: float | None = None  # m
    optical_depth: float = field(init=False)

    def __post_init__(self):
        if self.n_atoms < 0:
            raise ValueError("atom number must be non-negative")
        if not self.area > 0 or not self.sigma0 > 0:
            raise ValueError("area and sigma0 must be positive")
        if self.density is not None and self.length is not None:
            expected = self.density * self.length * self.area
            if not math.isclose(self.n_atoms, expected, rel_tol=1e-9):
                raise ValueError(
                    f"atom number {self.n_atoms:.6g} inconsistent with density*length*area = {expected:.6g}"
                )
        object.__setattr__(self, "optical_depth", self.sigma0 * self.n_atoms / self.area)

    @classmethod
    def from_density(cls, density: float, length: float, area: float, line: TransitionLine):
        if not length > 0:
            raise ValueError("ensemble length must be positive")
        return cls(n_atoms=density * length * area, area=area, sigma0=line.sigma0,
                   density=density, length=length)

    @property
    def d(self) -> float:
        return self.optical_depth


def dispersion(x):
    """Dispersive Lorentzian x / (1 + x^2); odd, peak 1/2 at x = 1."""
    x = np.asarray(x, dtype=float)
    return x / (1.0 + x * x)


def _scalar_or_array(value):
    return float(value) if np.ndim(value) == 0 else value


def coupling_constant(detuning, line: TransitionLine, geom: BeamGeometry):
    """Single-pass phase coupling per unit F_z for a pi-polarized probe.

    ``(lambda^2 / 2 pi A) x / (1 + x^2)`` with ``x = 2 Delta / gamma``.
    """
    detuning = np.asarray(detuning, dtype=float)
    if not np.all(np.isfinite(detuning)):
        raise ValueError("detuning must be finite")
    x = 2.0 * detuning / line.linewidth
    return _scalar_or_array(line.sigma0 / geom.area * dispersion(x))


def refractive_index(omega, ens: EnsembleConfig, mean_fz, line: TransitionLine, geom: BeamGeometry):
    """Effective index ``1 - (lambda / 2 pi l) 2 <F_z> kappa(Delta_34)``.

    This is the index seen by a probe whose phase shifts from the f=3 and f=4
    populations cancel for a balanced ensemble, so only the population
    difference survives. Use :func:`population_index` for the full two-level
    sum away from that operating point.
    """
    if ens.length is None or not ens.length > 0:
        raise ValueError("refractive index needs a positive ensemble length")
    kappa = coupling_constant(line.detuning(omega, 4, 3), line, geom)
    return _scalar_or_array(1.0 - line.wavelength / (2.0 * np.pi * ens.length) * 2.0 * np.asarray(mean_fz) * kappa)


def population_index(omega, ens: EnsembleConfig, mean_fz, line: TransitionLine, geom: BeamGeometry):
    """Index from the sum over both clock-state populations and all pi lines.

    n - 1 = -(lambda / 2 pi l) sum_f N_f sum_f' s_ff' kappa(Delta_f'f),
    with N_4 = N/2 + <F_z> and N_3 = N/2 - <F_z>.
    """
    if ens.length is None or not ens.length > 0:
        raise ValueError("refractive index needs a positive ensemble length")
    omega = np.asarray(omega, dtype=float)
    pops = {4: ens.n_atoms / 2 + mean_fz, 3: ens.n_atoms / 2 - mean_fz}
    phase = np.zeros_like(omega)
    for f, fp in line.active_transitions():
        phase = phase + pops[f] * line.strength(f, fp) * coupling_constant(line.detuning(omega, f, fp), line, geom)
    return _scalar_or_array(1.0 - line.wavelength / (2.0 * np.pi * ens.length) * phase)


def zero_index_frequency(line: TransitionLine) -> float:
    """Frequency between the two clock-state lines where a balanced ensemble gives no phase shift."""
    lo = line.transition(4, 3)
    hi = line.transition(3, 4)
    pad = 10.0 * line.linewidth

    def balanced(omega):
        return sum(line.strength(f, fp) * float(dispersion(2.0 * line.detuning(omega, f, fp) / line.linewidth))
                   for f, fp in line.active_transitions())

    return brentq(balanced, lo + pad, hi - pad, xtol=1e-6, rtol=4 * np.finfo(float).eps)


def _check_poles(omega, line: TransitionLine):
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    for f, fp in line.active_transitions():
        near = np.abs(omega - line.transition(f, fp)) < POLE_EXCLUSION * line.linewidth
        if np.any(near):
            raise ResonanceError(
                f"frequency within {POLE_EXCLUSION:g} linewidths of the f={f} -> f'={fp} resonance"
            )


def level_light_shift(omega, f: int, line: TransitionLine, geom: BeamGeometry):
    """AC Stark shift (rad/s) of the clock state in ground level f.

    Dispersive, unsaturated: ``(Phi sigma0 / 2) sum_f' s_ff' x / (1 + x^2)``
    where Phi = P / (hbar omega_L A) is the photon flux density.
    """
    _check_poles(omega, line)
    omega = np.asarray(omega, dtype=float)
    flux = geom.power / (sc.hbar * (line.carrier + omega) * geom.area)
    total = np.zeros_like(omega)
    for fp in EXCITED_LEVELS:
        s = line.strength(f, fp)
        if s:
            total = total + s * dispersion(2.0 * line.detuning(omega, f, fp) / line.linewidth)
    return _scalar_or_array(0.5 * flux * line.sigma0 * total)


def differential_light_shift(omega, line: TransitionLine, geom: BeamGeometry):
    """Light shift of |4> minus that of |3> (rad/s)."""
    return _scalar_or_array(
        np.asarray(level_light_shift(omega, 4, line, geom)) - np.asarray(level_light_shift(omega, 3, line, geom))
    )


def eta_from_geometry(detuning, n_ph, line: TransitionLine, geom: BeamGeometry,
                      ground_f: int = 4, arm_fraction: float = 0.5):
    """Probability that an atom in ``ground_f`` scatters a photon during the pulse.

    ``eta = N_ph (sigma0 / A) s_f / (1 + x^2)`` with ``s_f = arm_fraction * pi_strength(f)``.
    ``arm_fraction`` is the share of photons that traverse the atoms: 1/2 in a
    balanced Mach-Zehnder, 1 when all light passes the ensemble.
    """
    n_ph = np.asarray(n_ph, dtype=float)
    if np.any(n_ph < 0):
        raise ValueError("photon number must be non-negative")
    x = 2.0 * np.asarray(detuning, dtype=float) / line.linewidth
    s_f = arm_fraction * line.pi_strength(ground_f)
    eta = n_ph * line.sigma0 / geom.area * s_f / (1.0 + x * x)
    eta = np.maximum(eta, 0.0)
    if np.any(eta > ETA_PERTURBATIVE_LIMIT):
        warnings.warn(f"eta = {np.max(eta):.3g} exceeds {ETA_PERTURBATIVE_LIMIT}; perturbative scattering model is unreliable",
                      RuntimeWarning, stacklevel=2)
    return _scalar_or_array(eta)


def kappa_squared(coupling, n_at, n_ph):
    """Collective coupling ``kappa^2 = coupling^2 N_at N_ph / 4``."""
    if np.any(np.asarray(n_at) < 0) or np.any(np.asarray(n_ph) < 0):
        raise ValueError("atom and photon numbers must be non-negative")
    return _scalar_or_array(0.25 * np.square(coupling) * np.asarray(n_at, dtype=float) * np.asarray(n_ph, dtype=float))


def neglected_cross_coupling(detuning, line: TransitionLine, near: tuple[int, int] = (3, 4)) -> float:
    """|coupling to the far ground level| / |coupling to the near one| for a probe at ``detuning`` from ``near``.

    Only reported; the multi-colour variance formulas drop this term.
    """
    f, fp = near
    other_f = 4 if f == 3 else 3
    other_fp = 3 if fp == 4 else 4
    omega = line.transition(f, fp) + detuning
    x_near = 2.0 * detuning / line.linewidth
    x_far = 2.0 * line.detuning(omega, other_f, other_fp) / line.linewidth
    return abs(float(dispersion(x_far)) / float(dispersion(x_near)))
