"""Squeezing in the presence of inelastic scattering, and its optimization over eta.

Three closed forms are provided, all functions of optical depth ``d`` and the
per-atom scattering probability ``eta``:

``single_D1``
    one pi-polarized probe on the Cs D1 line, m != 0 population removed.
``cycling``
    idealized two-colour probing of closed transitions, 1 / ((1-eta)^2 (1+d eta)).
``two_colour_D1``
    two-colour probing of the Cs D1 clock states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy.optimize import minimize_scalar

ETA_MIN = 1e-6
ETA_MAX = 0.9
ETA_TOL = 1e-8
_SCAN_POINTS = 400


class OptimizationError(RuntimeError):
    pass


def _validate(d, eta):
    d = np.asarray(d, dtype=float)
    eta = np.asarray(eta, dtype=float)
    if np.any(d <= 0):
        raise ValueError("optical depth must be positive")
    if np.any(eta < 0) or np.any(eta >= 1):
        raise ValueError("eta must lie in [0, 1)")
    return d, eta


def _out(value):
    return float(value) if np.ndim(value) == 0 else value


def xi_single_d1(d, eta):
    d, eta = _validate(d, eta)
    loss = 1 - 2 * eta / 3
    return _out(loss / (1 + d * eta / 2)
                + 4 * eta / 3 * loss * (1 - 3 * eta / 4) / (1 - eta) ** 2)


def xi_two_colour_cycling(d, eta):
    d, eta = _validate(d, eta)
    return _out(1.0 / ((1 - eta) ** 2 * (1 + d * eta)))


def xi_two_colour_d1(d, eta):
    d, eta = _validate(d, eta)
    loss = 1 - 2 * eta / 3
    return _out(loss**3 / ((1 - eta) ** 2 * (1 + d * eta))
                + 2 * eta / 3 * loss**2 / (1 - eta) ** 2)


def eta_opt_cycling(d):
    """(d - 2) / 3d, clamped at zero below d = 2."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError("optical depth must be positive")
    return _out(np.maximum((d - 2) / (3 * d), 0.0))


FORMULAS: Mapping[str, Callable] = {
    "single_D1": xi_single_d1,
    "cycling": xi_two_colour_cycling,
    "two_colour_D1": xi_two_colour_d1,
}

_ALIASES = {
    "single-d1": "single_D1", "single_d1": "single_D1",
    "two-colour-d1": "two_colour_D1", "two_colour_d1": "two_colour_D1",
    "two-color-d1": "two_colour_D1",
}


def formula_id(name: str) -> str:
    name = _ALIASES.get(name, name)
    if name not in FORMULAS:
        raise KeyError(f"unknown squeezing formula {name!r}; choose from {sorted(FORMULAS)}")
    return name


def asymptote(formula: str, d):
    """Large-d closed-form minimum squeezing, or None where none is known."""
    formula = formula_id(formula)
    d = np.asarray(d, dtype=float)
    if formula == "cycling":
        return _out(27.0 / (4.0 * d))
    if formula == "single_D1":
        return _out(np.sqrt(32.0 / (3.0 * d)))
    return None


def eta_asymptote(formula: str, d):
    formula = formula_id(formula)
    d = np.asarray(d, dtype=float)
    if formula == "cycling":
        return _out(np.full_like(d, 1.0 / 3.0))
    if formula == "single_D1":
        return _out(np.sqrt(3.0 / (2.0 * d)))
    return None


@dataclass(frozen=True)
class SqueezingResult:
    xi2: float
    eta: float
    d: float
    formula: str
    kappa2: float | None = None
    eta_opt: float | None = None
    asymptote: float | None = None

    def __post_init__(self):
        if not self.xi2 > 0:
            raise ValueError("xi^2 must be positive")
        if not 0 <= self.eta < 1:
            raise ValueError("eta must lie in [0, 1)")


def squeezing(formula: str, d: float, eta: float) -> SqueezingResult:
    """Evaluate a formula at fixed (d, eta); kappa^2 is the coherent d eta / 2."""
    fid = formula_id(formula)
    return SqueezingResult(xi2=FORMULAS[fid](d, eta), eta=float(eta), d=float(d), formula=fid,
                           kappa2=d * eta / 2, asymptote=asymptote(fid, d))


def optimize_eta(formula: str, d: float) -> tuple[float, float]:
    """Minimize xi^2(eta) over eta in (0, 0.9] by golden-section search.

    A log-spaced scan locates the bracket; more than one interior local minimum
    or a minimum pinned at the upper cap is treated as a bracket failure. When
    the scan minimum sits at eta = 0 (e.g. cycling with d <= 2) probing does not
    help and (0, 1) is returned.
    """
    fid = formula_id(formula)
    if not d > 0:
        raise ValueError("optical depth must be positive")
    f = FORMULAS[fid]
    grid = np.concatenate(([0.0], np.geomspace(ETA_MIN, ETA_MAX, _SCAN_POINTS)))
    values = f(d, grid)
    i = int(np.argmin(values))
    interior = (values[1:-1] < values[:-2]) & (values[1:-1] < values[2:])
    if np.count_nonzero(interior) > 1:
        raise OptimizationError(f"{fid} is not unimodal in eta at d={d:g}")
    if i == len(grid) - 1:
        raise OptimizationError(f"{fid} minimum at d={d:g} lies at the eta cap {ETA_MAX}")
    if i == 0:
        return 0.0, float(values[0])
    a, b, c = grid[i - 1], grid[i], grid[i + 1]
    # scipy's golden tolerance is relative; scale it to an absolute ETA_TOL
    res = minimize_scalar(lambda e: f(d, e), bracket=(a, b, c), method="golden",
                          tol=ETA_TOL / max(b, ETA_TOL))
    eta = float(res.x)
    if not a <= eta <= c:
        raise OptimizationError("golden-section search left its bracket")
    return eta, float(res.fun)


@dataclass(frozen=True)
class DepthSweep:
    formula: str
    d: np.ndarray
    eta_opt: np.ndarray
    xi2_min: np.ndarray
    xi2_asymptote: np.ndarray = field(repr=False)

    def rows(self):
        for d, e, x, a in zip(self.d, self.eta_opt, self.xi2_min, self.xi2_asymptote):
            yield {"d": float(d), "eta_opt": float(e), "xi2_min": float(x),
                   "xi2_asymptote": None if np.isnan(a) else float(a), "formula_id": self.formula}


def sweep_depth(formula: str, d_grid) -> DepthSweep:
    fid = formula_id(formula)
    d_grid = np.asarray(d_grid, dtype=float).ravel()
    if np.any(d_grid <= 0):
        raise ValueError("optical depths must be positive")
    if np.any(np.diff(d_grid) <= 0):
        raise ValueError("depth grid must be strictly increasing")
    pairs = [optimize_eta(fid, d) for d in d_grid]
    eta = np.array([p[0] for p in pairs], dtype=float)
    xi2 = np.array([p[1] for p in pairs], dtype=float)
    asym = asymptote(fid, d_grid)
    asym = np.full(d_grid.shape, np.nan) if asym is None else np.asarray(asym, dtype=float)
    return DepthSweep(fid, d_grid, eta, xi2, asym)


# --- scattering budgets -------------------------------------------------------

@dataclass(frozen=True)
class ScatteringBudget:
    eta: float
    channels: Mapping[str, float]
    scheme: str

    @property
    def total(self) -> float:
        return math.fsum(self.channels.values())


def single_probe_budget(eta: float) -> ScatteringBudget:
    """Loss to m = +-1 with 2 eta/3; return to the initial state with eta/3."""
    return ScatteringBudget(eta, {"loss": 2 * eta / 3, "dc": eta / 3}, "mz1")


# (numerator, denominator) of each |f m> channel as a multiple of eta, per photon colour
TWO_COLOUR_D1_CHANNELS = {
    "3": {(3, 0): (1, 6), (3, 1): (1, 16), (3, -1): (1, 16), (4, 1): (5, 48), (4, -1): (5, 48)},
    "4": {(4, 0): (1, 6), (4, 1): (5, 48), (4, -1): (5, 48), (3, 1): (1, 16), (3, -1): (1, 16)},
}


def two_colour_budget(eta: float) -> ScatteringBudget:
    """Cs D1 two-colour channels; the two colours carry eta/2 each.

    Channel keys read ``"w3:|3,+1>"``: photon colour, then final |f, m>.
    """
    channels = {}
    for colour, table in TWO_COLOUR_D1_CHANNELS.items():
        for (f, m), (num, den) in table.items():
            channels[f"w{colour}:|{f},{m:+d}>"] = num * eta / den
    return ScatteringBudget(eta, channels, "mz2")


def two_colour_coefficient(eta: float, colour: int, f: int, m: int) -> float:
    return two_colour_budget(eta).channels[f"w{colour}:|{f},{m:+d}>"]
