"""Squeezing from one probe once scattering is accounted for.

Start from the ensemble geometry (r = 50 um, l = 2 pi r^2 / lambda,
n = 1e10 cm^-3) and a probe at the zero phase-shift point. The photon number
sets eta. More light buys measurement strength (kappa^2 = d eta / 2) and costs
atoms lost to m != 0 sublevels. The optimum eta balances the two, and at
large depth the best xi^2 only falls like 1/sqrt(d).
"""

import numpy as np

from qndsqueeze.atomic import BeamGeometry, EnsembleConfig, eta_from_geometry, load_line, zero_index_frequency
from qndsqueeze.decoherence import asymptote, optimize_eta, squeezing, sweep_depth
from _plotting import pyplot, save

line = load_line()
geom = BeamGeometry.from_waist(50e-6)
length = 2 * np.pi * geom.waist**2 / line.wavelength
ens = EnsembleConfig.from_density(1e16, length, geom.area, line)
detuning = zero_index_frequency(line) - line.transition(4, 3)

print(f"N_at = {ens.n_atoms:.3g}, d = {ens.d:.1f}")
for n_ph in (2e10, 5e10, 9.5e10, 2e11):
    eta = eta_from_geometry(detuning, n_ph, line, geom)
    res = squeezing("single_D1", ens.d, eta)
    print(f"N_ph = {n_ph:8.2g}  eta = {eta:.3f}  kappa^2 = {res.kappa2:5.2f}  xi^2 = {res.xi2:.3f}")

eta0, xi2 = optimize_eta("single_D1", ens.d)
print(f"best at d = {ens.d:.1f}: eta = {eta0:.3f}, xi^2 = {xi2:.3f}")
eta0, xi2 = optimize_eta("single_D1", 100)
print(f"best at d = 100: eta = {eta0:.3f}, xi^2 = {xi2:.3f}")

d = np.geomspace(1, 1e4, 80)
sweep = sweep_depth("single_D1", d)
plt = pyplot()
if plt is not None:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.loglog(d, sweep.xi2_min, label="optimized")
    ax.loglog(d, asymptote("single_D1", d), ls="--", label="sqrt(32 / 3d)")
    ax.set_xlabel("optical depth d")
    ax.set_ylabel("xi^2_min")
    ax.legend()
    save(fig, "02_single_probe_budget.png")
