"""Where to park a single probe on the Cs D1 line.

A balanced ensemble (<F_z> = 0) shifts the probe phase by an amount set by
both clock-state populations. Between the f=4 -> f'=3 and f=3 -> f'=4 lines
there is one frequency where the two contributions cancel. A probe there
keeps the interferometer balanced, but the two clock states still see
different AC Stark shifts. That residual differential shift is what the
multi-colour schemes remove.
"""

import numpy as np

from qndsqueeze.atomic import (BeamGeometry, EnsembleConfig, differential_light_shift, load_line,
                               mhz_to_rad_s, population_index, rad_s_to_mhz, zero_index_frequency)
from _plotting import pyplot, save

line = load_line()
geom = BeamGeometry.from_waist(20e-6, power=1e-6)
ens = EnsembleConfig.from_density(1e17, 1e-2, geom.area, line)  # 1e11 cm^-3

zero = zero_index_frequency(line)
print(f"constants table {line.version}")
print(f"f=4 -> f'=3 at {rad_s_to_mhz(line.transition(4, 3)):9.1f} MHz")
print(f"f=3 -> f'=4 at {rad_s_to_mhz(line.transition(3, 4)):9.1f} MHz")
print(f"zero phase shift at {rad_s_to_mhz(zero):9.1f} MHz")
print(f"differential light shift there: {differential_light_shift(zero, line, geom) / (2 * np.pi):.1f} Hz")

# stay clear of the poles so the plot is readable
f_mhz = np.linspace(-7000, 7000, 2801)
omega = mhz_to_rad_s(f_mhz)
keep = np.ones_like(omega, dtype=bool)
for f, fp in line.active_transitions():
    keep &= np.abs(omega - line.transition(f, fp)) > 0.2 * line.linewidth
f_mhz, omega = f_mhz[keep], omega[keep]
index = population_index(omega, ens, 0.0, line, geom)
shift_hz = differential_light_shift(omega, line, geom) / (2 * np.pi)

plt = pyplot()
if plt is not None:
    fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(6, 5))
    top.plot(f_mhz, index - 1)
    top.set_ylabel("n - 1")
    bottom.plot(f_mhz, shift_hz / 1e3)
    bottom.set_ylabel("shift |4> - |3> (kHz)")
    bottom.set_xlabel("frequency from line centre (MHz)")
    bottom.set_ylim(-200, 200)
    for ax in (top, bottom):
        ax.axvline(rad_s_to_mhz(zero), color="k", lw=0.5, ls="--")
    save(fig, "01_dispersion_and_light_shift.png")
