"""Two colours through opposite interferometer ports.

One probe near f=3 -> f'=4 and one near f=4 -> f'=3, with equal photon
numbers and equal detunings, give each clock state the same light shift. The
mean atomic rotation is exactly zero, and the phase signal is still linear in
F_z. Scattering now returns a third of the atoms to the clock states, so the
same depth gives roughly twice the squeezing of a single probe.
"""

import numpy as np

from qndsqueeze.atomic import BeamGeometry, EnsembleConfig, eta_from_geometry, load_line, mhz_to_rad_s
from qndsqueeze.decoherence import optimize_eta, squeezing, sweep_depth, two_colour_budget
from qndsqueeze.schemes import Scheme, SchemeConfig, detect, scheme_atom_light_shift
from _plotting import pyplot, save

line = load_line()
geom = BeamGeometry.from_waist(50e-6)
ens = EnsembleConfig.from_density(1e16, 2 * np.pi * geom.waist**2 / line.wavelength, geom.area, line)

delta = mhz_to_rad_s(150)
cfg = SchemeConfig.from_detunings(Scheme.TWO_COLOUR_MZ, line, geom, n_ph3=9e7, n_ph4=9e7,
                                  detuning34=delta, detuning43=delta)
eta = eta_from_geometry(delta, 9e7, line, geom)
res = squeezing("two_colour_D1", ens.d, eta)
print(f"d = {ens.d:.1f}, eta = {eta:.3f}, xi^2 = {res.xi2:.3f}")
print(f"mean atomic rotation: {scheme_atom_light_shift(cfg, ens.n_atoms)}")
print(f"neglected cross coupling: {cfg.cross_coupling(line):.3f}")
det = detect(cfg, ens.n_atoms)
print(f"detector variance / shot noise = {det.variance / det.shot_noise:.3f}"
      f" (N_at / 2 N_ph = {det.quadratic_excess:.4f})")

print("scattering channels:")
for name, p in two_colour_budget(eta).channels.items():
    print(f"  {name:10s} {p:.5f}")

single = optimize_eta("single_D1", 100)[1]
double = optimize_eta("two_colour_D1", 100)[1]
print(f"d = 100: single {single:.3f}, two-colour {double:.3f}, ratio {double / single:.2f}")

d = np.geomspace(1, 1e4, 80)
plt = pyplot()
if plt is not None:
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for fid in ("single_D1", "two_colour_D1", "cycling"):
        ax.loglog(d, sweep_depth(fid, d).xi2_min, label=fid)
    ax.set_xlabel("optical depth d")
    ax.set_ylabel("xi^2_min")
    ax.legend()
    save(fig, "03_two_colour_probing.png")
