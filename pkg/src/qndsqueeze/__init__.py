"""Spin squeezing of atomic ensembles by single- and multi-colour QND probing."""

from .atomic import (BeamGeometry, EnsembleConfig, ResonanceError, TransitionLine, coupling_constant,
                     differential_light_shift, eta_from_geometry, kappa_squared, load_line, mhz_to_rad_s,
                     population_index, rad_s_to_mhz, refractive_index, zero_index_frequency)
from .decoherence import (ScatteringBudget, SqueezingResult, eta_opt_cycling, optimize_eta,
                          single_probe_budget, sweep_depth, two_colour_budget, xi_single_d1,
                          xi_two_colour_cycling, xi_two_colour_d1)
from .moments import MomentState, RotationAngle, css_atoms, css_light, output_beamsplitter, rotate_z
from .oracle import exact_output_variance, exact_two_colour_variance, posterior_conditional_variance
from .schemes import (DetectionResult, Scheme, SchemeConfig, am_angles, am_phase_readout,
                      conditional_variance, single_probe_angles, single_probe_current,
                      two_colour_angles, two_colour_current)

__version__ = "0.1.0"
