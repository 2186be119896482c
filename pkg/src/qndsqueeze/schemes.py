"""Detector observables for the three probing configurations.

* ``SINGLE_PROBE_MZ`` - one pi-polarized probe in a balanced Mach-Zehnder.
* ``TWO_COLOUR_MZ`` - probes near f=3 -> f'=4 and f=4 -> f'=3 injected through
  opposite input ports.
* ``AMPLITUDE_MODULATED`` - two sideband pairs straddling those lines,
  demodulated at the sideband spacings; no spatial interferometer.

Single-probe quantities use field "4" of :class:`SchemeConfig` (photon number
``n_ph4`` and coupling ``coupling4`` evaluated at Delta_34).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .atomic import (BeamGeometry, TransitionLine, coupling_constant, kappa_squared,
                     neglected_cross_coupling)
from .moments import RotationAngle, css_atoms, css_light, output_beamsplitter, rotate_z

PROJECTION_NOISE_RATIO = 1e-2  # N_at / N_ph,4 below this counts as "<< 1"
SMALL_ANGLE_LIMIT = 0.1  # rad, bound on |4 kappa N_at / 2| for the AM demodulator


class Scheme(enum.Enum):
    SINGLE_PROBE_MZ = "mz1"
    TWO_COLOUR_MZ = "mz2"
    AMPLITUDE_MODULATED = "am"


class SchemeError(ValueError):
    """Configuration violates the operating conditions of a scheme."""


class SmallAngleError(SchemeError):
    pass


@dataclass(frozen=True)
class SchemeConfig:
    scheme: Scheme
    n_ph3: float = 0.0
    n_ph4: float = 0.0
    coupling3: float = 0.0
    coupling4: float = 0.0
    detuning34: float | None = None  # rad/s, omega_4 (or single probe) from f=4 -> f'=3
    detuning43: float | None = None  # rad/s, omega_3 from f=3 -> f'=4
    sideband3: float | None = None  # rad/s, Omega_3
    sideband4: float | None = None
    sideband_ratio3: float = 1.0  # P(upper) / P(lower)
    sideband_ratio4: float = 1.0
    enforce_balance: bool = True

    def __post_init__(self):
        if self.n_ph3 < 0 or self.n_ph4 < 0:
            raise ValueError("photon numbers must be non-negative")

    @classmethod
    def from_detunings(cls, scheme: Scheme, line: TransitionLine, geom: BeamGeometry, *,
                       n_ph3: float = 0.0, n_ph4: float = 0.0,
                       detuning34: float | None = None, detuning43: float | None = None,
                       sideband3: float | None = None, sideband4: float | None = None,
                       **kwargs) -> "SchemeConfig":
        """Derive couplings from detunings.

        For the AM scheme the coupling of a sideband pair is the common strength
        ``(kappa(D + Omega/2) - kappa(D - Omega/2)) / 2``, which is the magnitude
        each sideband sees when the carrier D sits on resonance.
        """
        scheme = Scheme(scheme)
        k3 = k4 = 0.0
        if scheme is Scheme.AMPLITUDE_MODULATED:
            if sideband3 is None or sideband4 is None:
                raise SchemeError("the AM scheme needs both sideband offsets")
            c3 = 0.0 if detuning43 is None else detuning43
            c4 = 0.0 if detuning34 is None else detuning34
            k3 = 0.5 * (coupling_constant(c3 + sideband3 / 2, line, geom) - coupling_constant(c3 - sideband3 / 2, line, geom))
            k4 = 0.5 * (coupling_constant(c4 + sideband4 / 2, line, geom) - coupling_constant(c4 - sideband4 / 2, line, geom))
        else:
            if detuning34 is not None:
                k4 = coupling_constant(detuning34, line, geom)
            if detuning43 is not None:
                k3 = coupling_constant(detuning43, line, geom)
        return cls(scheme, n_ph3=n_ph3, n_ph4=n_ph4, coupling3=float(k3), coupling4=float(k4),
                   detuning34=detuning34, detuning43=detuning43,
                   sideband3=sideband3, sideband4=sideband4, **kwargs)

    def cross_coupling(self, line: TransitionLine) -> float | None:
        """Largest neglected far-level coupling ratio, for reporting only.

        Undefined for the single probe, which couples to both levels by design.
        """
        if self.scheme is Scheme.SINGLE_PROBE_MZ:
            return None
        ratios = []
        for detuning, sideband, near in ((self.detuning43, self.sideband3, (3, 4)),
                                         (self.detuning34, self.sideband4, (4, 3))):
            if detuning is None:
                continue
            if self.scheme is Scheme.AMPLITUDE_MODULATED:
                # the light sits at the sidebands, not at the carrier
                detuning = detuning + sideband / 2
            ratios.append(neglected_cross_coupling(detuning, line, near=near))
        return max(ratios) if ratios else None


@dataclass(frozen=True)
class DetectionResult:
    mean: float
    variance: float
    kappa2: float
    shot_noise: float
    quadratic_excess: float = 0.0  # N_at / (2 N_ph,4)
    projection_noise_regime: bool = True

    def __post_init__(self):
        if self.variance < self.shot_noise * (1 - 1e-12):
            raise ValueError("detector variance fell below the shot-noise floor")


def _require(cfg: SchemeConfig, scheme: Scheme):
    if cfg.scheme is not scheme:
        raise SchemeError(f"expected a {scheme.value} configuration, got {cfg.scheme.value}")


def squeezing_parameter(kappa2):
    """xi^2 = 1 / (1 + kappa^2) for the coherent QND interaction."""
    return 1.0 / (1.0 + np.asarray(kappa2, dtype=float))


def conditional_variance(kappa2, n_at):
    """Var F_z after a quantum-limited readout: (N_at/4) / (1 + kappa^2)."""
    if np.any(np.asarray(kappa2) < 0):
        raise ValueError("kappa^2 must be non-negative")
    return np.asarray(n_at, dtype=float) / 4.0 * squeezing_parameter(kappa2)


def difference_current_variance(n_ph, kappa2):
    """Balanced single-probe difference current: N_ph (1 + kappa^2)."""
    return n_ph * (1.0 + kappa2)


# --- single probe -----------------------------------------------------------

def single_probe_angles(cfg: SchemeConfig, n_at: float):
    """theta_at = 2 k (N_ph/2 + S_z), theta_ph = -2 k F_z, for CSS inputs."""
    _require(cfg, Scheme.SINGLE_PROBE_MZ)
    k, n_ph = cfg.coupling4, cfg.n_ph4
    theta_at = RotationAngle(offset=k * n_ph, coefficients={"S_z": 2 * k},
                             sources={"S_z": (0.0, n_ph / 4)})
    theta_ph = RotationAngle(coefficients={"F_z": -2 * k}, sources={"F_z": (0.0, n_at / 4)})
    return theta_at, theta_ph


def single_probe_kappa2(cfg: SchemeConfig, n_at: float) -> float:
    """kappa^2 seen by the detector.

    The light phase couples to F_z with strength 2 k, so the propagated excess
    (N_ph/4) kappa^2 requires kappa^2 = kappa_squared(2k, N_at, N_ph) = k^2 N_at N_ph.
    """
    return float(kappa_squared(2 * cfg.coupling4, n_at, cfg.n_ph4))


def single_probe_current(cfg: SchemeConfig, n_at: float) -> DetectionResult:
    """Difference photocurrent from moment propagation through the interferometer."""
    _require(cfg, Scheme.SINGLE_PROBE_MZ)
    _, theta_ph = single_probe_angles(cfg, n_at)
    light = output_beamsplitter(rotate_z(css_light(cfg.n_ph4), theta_ph))
    # i_- = 2 S_dz
    mean = 2.0 * light.mean[2]
    variance = 4.0 * light.variance("z")
    return DetectionResult(mean=float(mean), variance=variance,
                           kappa2=single_probe_kappa2(cfg, n_at), shot_noise=cfg.n_ph4)


# --- two colour -------------------------------------------------------------

def _check_two_colour(cfg: SchemeConfig):
    _require(cfg, Scheme.TWO_COLOUR_MZ)
    if cfg.detuning34 is not None and cfg.detuning43 is not None and cfg.detuning34 == cfg.detuning43:
        if not math.isclose(cfg.coupling3, cfg.coupling4, rel_tol=1e-12, abs_tol=0.0):
            raise SchemeError("equal detunings must give equal couplings")
    if cfg.enforce_balance:
        if cfg.n_ph3 != cfg.n_ph4:
            raise SchemeError("balanced two-colour probing needs equal photon numbers")
        if not math.isclose(cfg.coupling3, cfg.coupling4, rel_tol=1e-12, abs_tol=0.0):
            raise SchemeError("balanced two-colour probing needs Delta_43 = Delta_34")


def two_colour_angles(cfg: SchemeConfig, n_at: float):
    """Rotation angles (theta_at, theta_ph3, theta_ph4); every field couples through k_4."""
    _check_two_colour(cfg)
    k = cfg.coupling4
    theta_at = RotationAngle(
        offset=k * (cfg.n_ph4 / 2 - cfg.n_ph3 / 2),
        coefficients={"S_z4": k, "S_z3": -k},
        sources={"S_z4": (0.0, cfg.n_ph4 / 4), "S_z3": (0.0, cfg.n_ph3 / 4)},
    )
    fz = {"F_z": (0.0, n_at / 4)}
    theta_ph3 = RotationAngle(offset=-k * n_at / 2, coefficients={"F_z": k}, sources=fz)
    theta_ph4 = RotationAngle(offset=-k * n_at / 2, coefficients={"F_z": -k}, sources=fz)
    return theta_at, theta_ph3, theta_ph4


def two_colour_inputs(cfg: SchemeConfig):
    """Field 3 enters through one port (<S_3x> > 0), field 4 through the other."""
    return css_light(cfg.n_ph3, +1, "light3"), css_light(cfg.n_ph4, -1, "light4")


def two_colour_kappa2(cfg: SchemeConfig, n_at: float) -> float:
    return float(kappa_squared(cfg.coupling4, n_at, cfg.n_ph4))


def two_colour_current(cfg: SchemeConfig, n_at: float) -> DetectionResult:
    """Var i_- = 2 N_ph4 [1 + 2 kappa^2 (1 + N_at / 2 N_ph4)]."""
    _check_two_colour(cfg)
    n4 = cfg.n_ph4
    kappa2 = two_colour_kappa2(cfg, n_at)
    ratio = n_at / (2 * n4) if n4 > 0 else 0.0
    shot = 2.0 * n4
    variance = shot * (1.0 + 2.0 * kappa2 * (1.0 + ratio))
    regime = n4 > 0 and n_at / n4 < PROJECTION_NOISE_RATIO
    return DetectionResult(mean=0.0, variance=variance, kappa2=kappa2, shot_noise=shot,
                           quadratic_excess=ratio, projection_noise_regime=regime)


# --- amplitude modulated ----------------------------------------------------

def _check_sidebands(cfg: SchemeConfig):
    _require(cfg, Scheme.AMPLITUDE_MODULATED)
    if cfg.sideband_ratio3 != 1.0 or cfg.sideband_ratio4 != 1.0:
        raise SchemeError("unequal sideband powers leave a net light shift")


def am_angles(cfg: SchemeConfig, n_at: float):
    """theta_at = k4 S_z4 - k3 S_z3, theta_ph3 = k3 (N/2 - F_z), theta_ph4 = k4 (N/2 + F_z)."""
    _check_sidebands(cfg)
    k3, k4 = cfg.coupling3, cfg.coupling4
    # balanced sidebands: <S_z3> = <S_z4> = 0
    theta_at = RotationAngle(
        coefficients={"S_z4": k4, "S_z3": -k3},
        sources={"S_z4": (0.0, cfg.n_ph4 / 4), "S_z3": (0.0, cfg.n_ph3 / 4)},
    )
    fz = {"F_z": (0.0, n_at / 4)}
    theta_ph3 = RotationAngle(offset=k3 * n_at / 2, coefficients={"F_z": -k3}, sources=fz)
    theta_ph4 = RotationAngle(offset=k4 * n_at / 2, coefficients={"F_z": k4}, sources=fz)
    return theta_at, theta_ph3, theta_ph4


def am_kappa2(cfg: SchemeConfig, n_at: float) -> float:
    """kappa^2 = 4 (k3^2 N_ph3 + k4^2 N_ph4) N_at."""
    return 4.0 * (cfg.coupling3**2 * cfg.n_ph3 + cfg.coupling4**2 * cfg.n_ph4) * n_at


def am_atomic_variance(cfg: SchemeConfig, n_at: float) -> float:
    """Var F_x after the interaction: (N_at/4)(1 + kappa^2)."""
    _check_sidebands(cfg)
    return n_at / 4 * (1.0 + am_kappa2(cfg, n_at))


def am_demodulated_phases(cfg: SchemeConfig, n_at: float, fz: float, linearize: bool = False):
    """Mixer outputs N_ph3 sin[4 k3 (N/2 - F_z)] and N_ph4 sin[4 k4 (N/2 + F_z)]."""
    a3 = 4 * cfg.coupling3 * (n_at / 2 - fz)
    a4 = 4 * cfg.coupling4 * (n_at / 2 + fz)
    if linearize:
        return cfg.n_ph3 * a3, cfg.n_ph4 * a4
    return cfg.n_ph3 * math.sin(a3), cfg.n_ph4 * math.sin(a4)


def am_phase_readout(cfg: SchemeConfig, n_at: float) -> DetectionResult:
    """Difference of the demodulated phases theta = theta_4 - theta_3.

    With k4 N_ph4 = k3 N_ph3,
    theta = 2 k4 (N_ph4 - (N_ph4/N_ph3) N_ph3) N_at + 8 k4 N_ph4 F_z,
    whose variance plus the shot noise N_ph3 + N_ph4 reduces to
    2 N_ph4 [1 + kappa^2 (1 + N_at / 2 N_ph4)] for equal photon numbers.
    """
    _check_sidebands(cfg)
    k3, k4, n3, n4 = cfg.coupling3, cfg.coupling4, cfg.n_ph3, cfg.n_ph4
    if not math.isclose(k4 * n4, k3 * n3, rel_tol=1e-12, abs_tol=0.0):
        raise SchemeError("AM readout needs k4 N_ph4 = k3 N_ph3")
    for label, k in (("3", k3), ("4", k4)):
        angle = 4 * k * n_at / 2
        if abs(angle) > SMALL_ANGLE_LIMIT:
            raise SmallAngleError(f"demodulated phase for field {label} is {angle:.4g} rad, beyond the linear regime")
    kappa2 = am_kappa2(cfg, n_at)
    shot = n3 + n4
    atoms = 16 * k4**2 * n4**2 * n_at  # Var(8 k4 N_ph4 F_z) with Var F_z = N/4
    number = 4 * k4**2 * n_at**2 * (n4 + (n4 / n3) ** 2 * n3) if n3 > 0 else 0.0
    variance = shot + atoms + number
    ratio = n_at / (2 * n4) if n4 > 0 else 0.0
    regime = n4 > 0 and n_at / n4 < PROJECTION_NOISE_RATIO
    return DetectionResult(mean=0.0, variance=variance, kappa2=kappa2, shot_noise=shot,
                           quadratic_excess=ratio, projection_noise_regime=regime)


def scheme_atom_light_shift(cfg: SchemeConfig, n_at: float) -> float:
    """Mean atomic rotation <theta_at> (the differential light-shift phase)."""
    builders = {
        Scheme.SINGLE_PROBE_MZ: single_probe_angles,
        Scheme.TWO_COLOUR_MZ: two_colour_angles,
        Scheme.AMPLITUDE_MODULATED: am_angles,
    }
    return builders[cfg.scheme](cfg, n_at)[0].mean


def detect(cfg: SchemeConfig, n_at: float) -> DetectionResult:
    dispatch = {
        Scheme.SINGLE_PROBE_MZ: single_probe_current,
        Scheme.TWO_COLOUR_MZ: two_colour_current,
        Scheme.AMPLITUDE_MODULATED: am_phase_readout,
    }
    return dispatch[cfg.scheme](cfg, n_at)
