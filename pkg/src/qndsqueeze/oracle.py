"""Exact and Bayesian cross-checks of the Gaussian moment formulas.

The QND unitary is diagonal in the F_z eigenbasis, so for every atomic
projection m the light leaving the interferometer is again a coherent state,
just phase shifted. Balanced detection of a coherent state gives two
independent Poisson counts, so the difference current is Skellam distributed
with means ``N_ph (1 +- sin phi_m) / 2``. Everything below is an exact finite
sum over m weighted by the binomial CSS distribution; no moment propagation is
involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ive, logsumexp
from scipy.stats import binom

MAX_ATOMS = 200
MAX_PHOTONS = 1e4
MAX_PHASE = 0.3  # bound on coupling * N_at for the exact sums
_PRIOR_CUTOFF = 60.0  # drop m with prior weight below exp(-60) of the peak


class OracleCapacityError(RuntimeError):
    """Requested dimensions exceed what the exact sums are meant for."""


class OracleNumericsError(FloatingPointError):
    pass


def css_distribution(n_at: int, cutoff: float | None = None):
    """Projections m = -N/2 .. N/2 and their binomial(N, 1/2) probabilities."""
    if n_at < 0 or int(n_at) != n_at:
        raise ValueError("atom number must be a non-negative integer")
    n_at = int(n_at)
    k = np.arange(n_at + 1)
    logp = binom.logpmf(k, n_at, 0.5)
    if cutoff is not None:
        keep = logp >= logp.max() - cutoff
        k, logp = k[keep], logp[keep]
    return k - n_at / 2, logp


def _check_caps(n_at, n_ph, coupling):
    if n_at > MAX_ATOMS or n_ph > MAX_PHOTONS:
        raise OracleCapacityError(f"exact sums are capped at N_at <= {MAX_ATOMS}, N_ph <= {MAX_PHOTONS:g}")
    if abs(coupling) * n_at >= MAX_PHASE:
        raise ValueError(f"coupling * N_at must stay below {MAX_PHASE}")


def _expect(weights, values) -> float:
    return math.fsum(np.asarray(weights) * np.asarray(values))


def exact_output_variance(n_at: int, n_ph: float, coupling: float) -> float:
    """Exact Var S_y of the single-probe interferometer light.

    For projection m the arm phase is 2 k m; given m, Var S_y = N_ph/4 and
    <S_y> = -(N_ph/2) sin(2 k m). The law of total variance over m gives the
    result.
    """
    _check_caps(n_at, n_ph, coupling)
    if n_at == 0 or coupling == 0:
        return n_ph / 4
    m, logp = css_distribution(n_at)
    p = np.exp(logp)
    shift = -0.5 * n_ph * np.sin(2 * coupling * m)
    mean = _expect(p, shift)
    spread = _expect(p, (shift - mean) ** 2)
    return n_ph / 4 + spread


def exact_two_colour_variance(n_at: int, n_ph4: float, coupling4: float, swap: bool = False) -> float:
    """Exact Var i_- for two coherent probes entering opposite ports.

    Field 3 (<S_x> = +N/2) is phase shifted by -k (N/2 - m), field 4
    (<S_x> = -N/2) by -k (N/2 + m); i_- = -2 (S_3y + S_4y). ``swap`` exchanges
    the roles of the two colours.
    """
    _check_caps(n_at, n_ph4, coupling4)
    if n_at == 0 or coupling4 == 0:
        return 2.0 * n_ph4
    m, logp = css_distribution(n_at)
    p = np.exp(logp)
    k = coupling4
    theta3 = -k * (n_at / 2 - m)
    theta4 = -k * (n_at / 2 + m)
    sx3, sx4 = n_ph4 / 2, -n_ph4 / 2
    if swap:
        theta3, theta4 = theta4, theta3
        sx3, sx4 = sx4, sx3
    # S_y^out = -sin(theta) S_x^in + cos(theta) S_y^in
    current = -2.0 * (-np.sin(theta3) * sx3 - np.sin(theta4) * sx4)
    mean = _expect(p, current)
    spread = _expect(p, (current - mean) ** 2)
    # each coherent field contributes Var(2 S_y) = N_ph per colour, independent of m
    return 2.0 * n_ph4 + spread


def skellam_logpmf(k, mu1, mu2):
    """log P(n1 - n2 = k) for independent Poisson n1 ~ mu1, n2 ~ mu2."""
    k = np.asarray(k, dtype=float)
    mu1 = np.asarray(mu1, dtype=float)
    mu2 = np.asarray(mu2, dtype=float)
    z = 2.0 * np.sqrt(mu1 * mu2)
    with np.errstate(divide="ignore"):
        log_bessel = np.log(ive(np.abs(k), z)) + z
    return -(mu1 + mu2) + 0.5 * k * (np.log(mu1) - np.log(mu2)) + log_bessel


@dataclass(frozen=True)
class PosteriorModel:
    """Binomial prior over m and Skellam detector law at the balanced point."""

    n_at: int
    n_ph: float
    coupling: float

    def __post_init__(self):
        if self.n_ph <= 0:
            raise ValueError("photon number must be positive")

    def prior(self):
        return css_distribution(self.n_at, cutoff=_PRIOR_CUTOFF)

    def port_means(self, m):
        phase = np.sin(2.0 * self.coupling * np.asarray(m, dtype=float))
        return 0.5 * self.n_ph * (1 + phase), 0.5 * self.n_ph * (1 - phase)

    def outcome_grid(self, n_sigma: float = 6.0, points: int = 1201):
        kappa2 = self.coupling**2 * self.n_at * self.n_ph
        sigma = math.sqrt(self.n_ph * (1 + kappa2))
        grid = np.unique(np.round(np.linspace(-n_sigma * sigma, n_sigma * sigma, points)))
        return grid

    def log_joint(self, outcomes):
        """log P(m) + log P(k | m) on an (outcome, m) grid."""
        m, logp = self.prior()
        mu1, mu2 = self.port_means(m)
        outcomes = np.asarray(outcomes, dtype=float)[:, None]
        return m, logp[None, :] + skellam_logpmf(outcomes, mu1[None, :], mu2[None, :])

    def posterior(self, outcomes):
        """Marginal P(k) and posterior mean/variance of m for each outcome k."""
        m, log_joint = self.log_joint(outcomes)
        log_marginal = logsumexp(log_joint, axis=1)
        if not np.all(np.isfinite(log_marginal)):
            raise OracleNumericsError("outcome likelihood underflowed")
        post = np.exp(log_joint - log_marginal[:, None])
        mean = np.array([math.fsum(row) for row in post * m])
        var = np.array([math.fsum(row) for row in post * (m[None, :] - mean[:, None]) ** 2])
        return np.exp(log_marginal), mean, var


def posterior_conditional_variance(n_at: int, n_ph: float, coupling: float,
                                   n_sigma: float = 6.0, points: int = 1201) -> float:
    """Outcome-averaged Var(F_z | i_-) from the exact Bayes posterior.

    The outcome sum is approximated by trapezoidal integration over a grid of
    integer outcomes spanning +-``n_sigma`` detector standard deviations.
    """
    if coupling == 0 or n_at == 0:
        return n_at / 4
    model = PosteriorModel(int(n_at), float(n_ph), float(coupling))
    grid = model.outcome_grid(n_sigma, points)
    marginal, _, var = model.posterior(grid)
    mass = np.trapezoid(marginal, grid)
    if abs(mass - 1.0) > 1e-6:
        raise OracleNumericsError(f"outcome marginal integrates to {mass:.9g}, not 1")
    return float(np.trapezoid(marginal * var, grid) / mass)


def coupling_for_kappa2(kappa2: float, n_at: float, n_ph: float) -> float:
    """Single-probe coupling k with k^2 N_at N_ph = kappa^2."""
    return math.sqrt(kappa2 / (n_at * n_ph))


def two_colour_coupling_for_kappa2(kappa2: float, n_at: float, n_ph4: float) -> float:
    """Two-colour coupling k_4 with k_4^2 N_at N_ph4 / 4 = kappa^2."""
    return math.sqrt(4 * kappa2 / (n_at * n_ph4))
