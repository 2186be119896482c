import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from sympy import Rational
from sympy.physics.wigner import wigner_3j, wigner_6j

from qndsqueeze.atomic import (POLE_EXCLUSION, BeamGeometry, EnsembleConfig, ResonanceError,
                               coupling_constant, differential_light_shift, eta_from_geometry,
                               kappa_squared, level_light_shift, load_line, mhz_to_rad_s,
                               neglected_cross_coupling, population_index, rad_s_to_mhz,
                               refractive_index, zero_index_frequency)

I_CS, J_D1 = Rational(7, 2), Rational(1, 2)


def dipole_weight(f, m, fp, mp):
    """|<f m| d |f' m'>|^2 up to a common factor, J = J' = 1/2."""
    return (2 * f + 1) * (2 * fp + 1) * wigner_6j(J_D1, f, I_CS, fp, J_D1, 1) ** 2 \
        * wigner_3j(f, 1, fp, -m, m - mp, mp) ** 2


# --- constants table ------------------------------------------------------------

def test_bundled_table_values(line):
    assert line.version == "cs-d1-2024.1"
    assert line.wavelength == pytest.approx(894.59295986e-9)
    assert line.linewidth == pytest.approx(2 * math.pi * 4.575e6)
    assert line.ground_splitting == pytest.approx(2 * math.pi * 9.192631770e9)
    assert line.sigma0 == pytest.approx(line.wavelength**2 / (2 * math.pi))


def test_hyperfine_interval_rule(line):
    assert line.ground_energy(4) - line.ground_energy(3) == pytest.approx(line.ground_splitting)
    assert line.excited_energy(4) - line.excited_energy(3) == pytest.approx(line.excited_splitting)
    # centre of gravity sits at zero
    cog = sum((2 * f + 1) * line.ground_energy(f) for f in (3, 4))
    assert cog == pytest.approx(0.0, abs=1e-6 * line.ground_splitting)


def test_pi_strengths_match_clebsch_gordan(line):
    for f in (3, 4):
        total = sum(dipole_weight(f, 0, fp, mp) for fp in (3, 4) for mp in (-1, 0, 1))
        for fp in (3, 4):
            pi_fraction = dipole_weight(f, 0, fp, 0) / total
            # unit table strength means one third of the two-level value 3 lambda^2 / 2 pi
            assert float(pi_fraction) == pytest.approx(line.strength(f, fp) / 3, abs=1e-15)


@pytest.mark.parametrize("colour, fp", [("3", 4), ("4", 3)])
def test_two_colour_channels_from_clebsch_gordan(colour, fp):
    """Each colour excites |f', 0> and carries eta/2; its decays fill the channel table."""
    from qndsqueeze.decoherence import TWO_COLOUR_D1_CHANNELS
    weights = {(f, m): dipole_weight(f, m, fp, 0) for f in (3, 4) for m in (-1, 0, 1)}
    total = sum(weights.values())
    table = {key: Rational(num, den) for key, (num, den) in TWO_COLOUR_D1_CHANNELS[colour].items()}
    nonzero = {key: w / total / 2 for key, w in weights.items() if w != 0}
    assert nonzero == table


def test_excited_decay_to_lower_level():
    to_f3 = {}
    for fp in (3, 4):
        weights = {(f, m): dipole_weight(f, m, fp, 0) for f in (3, 4) for m in (-1, 0, 1)}
        to_f3[fp] = sum(v for (f, _), v in weights.items() if f == 3) / sum(weights.values())
    assert to_f3 == {4: Rational(7, 12), 3: Rational(1, 4)}


def test_load_line_from_custom_file(tmp_path, line):
    path = tmp_path / "consts.json"
    path.write_text(json.dumps({
        "table_version": "test-1", "wavelength_m": 1e-6, "linewidth_fwhm_hz": 1e6,
        "ground_hyperfine_splitting_hz": 1e9, "excited_hyperfine_splitting_hz": 1e8,
        "pi_strength_f3_fp4": 0.5, "pi_strength_f4_fp3": 0.25,
    }))
    custom = load_line(path)
    assert custom.version == "test-1"
    assert custom.strength(3, 4) == 0.5 and custom.strength(4, 4) == 0.0
    assert custom.linewidth == pytest.approx(2 * math.pi * 1e6)


@pytest.mark.parametrize("field", ["wavelength", "linewidth", "ground_splitting", "excited_splitting"])
def test_line_rejects_nonpositive(line, field):
    from dataclasses import replace
    with pytest.raises(ValueError):
        replace(line, **{field: 0.0})


# --- geometry -----------------------------------------------------------------

def test_beam_waist_area_convention():
    geom = BeamGeometry.from_waist(20e-6)
    assert geom.area == math.pi * (20e-6) ** 2
    with pytest.raises(ValueError):
        BeamGeometry(area=1e-9, waist=20e-6)
    with pytest.raises(ValueError):
        BeamGeometry(area=0.0)
    with pytest.raises(ValueError):
        BeamGeometry(area=1e-9, pulse_duration=0.0)


def test_ensemble_consistency(line):
    area = math.pi * (50e-6) ** 2
    ens = EnsembleConfig.from_density(1e16, 0.017559, area, line)
    assert ens.n_atoms == pytest.approx(1e16 * 0.017559 * area)
    assert ens.d == pytest.approx(line.sigma0 * ens.n_atoms / area)
    # ensemble of the bundled fig4 scenario: N_at ~ 1.4e6 and d ~ 22
    assert ens.n_atoms == pytest.approx(1.4e6, rel=0.02)
    assert ens.d == pytest.approx(22, rel=0.02)
    with pytest.raises(ValueError, match="inconsistent"):
        EnsembleConfig(n_atoms=1.0, area=area, sigma0=line.sigma0, density=1e16, length=0.01)
    with pytest.raises(ValueError):
        EnsembleConfig.from_density(1e16, 0.0, area, line)


# --- coupling constant ----------------------------------------------------------

def test_coupling_examples(line):
    geom = BeamGeometry(area=1e-8)
    gamma = line.linewidth
    scale = line.wavelength**2 / (2 * math.pi * geom.area)
    assert coupling_constant(0.0, line, geom) == 0.0
    assert coupling_constant(gamma / 2, line, geom) == pytest.approx(line.wavelength**2 / (4 * math.pi * geom.area), rel=1e-14)
    assert coupling_constant(5 * gamma, line, geom) == pytest.approx(scale * 10 / 101, rel=1e-14)
    with pytest.raises(ValueError):
        coupling_constant(float("nan"), line, geom)


@given(st.floats(min_value=-1e12, max_value=1e12, allow_nan=False))
def test_coupling_odd_and_bounded(delta):
    line = load_line()
    geom = BeamGeometry(area=1e-8)
    k = coupling_constant(delta, line, geom)
    assert coupling_constant(-delta, line, geom) == -k
    assert abs(k) <= line.wavelength**2 / (4 * math.pi * geom.area) * (1 + 1e-15)


# --- refractive index -----------------------------------------------------------

@pytest.fixture
def fig2(line):
    geom = BeamGeometry.from_waist(20e-6, power=1e-6)
    ens = EnsembleConfig.from_density(1e17, 1e-2, geom.area, line)
    return ens, geom


def test_refractive_index_examples(line, fig2):
    ens, geom = fig2
    omega = mhz_to_rad_s(300.0)
    assert refractive_index(omega, ens, 0.0, line, geom) == 1.0
    on_resonance = line.transition(4, 3)
    assert refractive_index(on_resonance, ens, -ens.n_atoms / 2, line, geom) == 1.0


def test_refractive_index_linear_in_fz(line, fig2):
    ens, geom = fig2
    omega = mhz_to_rad_s(1234.0)
    deltas = [refractive_index(omega, ens, fz, line, geom) - 1 for fz in (-1e5, 2e5, 7e5)]
    per_atom = [d / fz for d, fz in zip(deltas, (-1e5, 2e5, 7e5))]
    assert per_atom[1] == pytest.approx(per_atom[0], rel=1e-12)
    assert per_atom[2] == pytest.approx(per_atom[0], rel=1e-12)


def test_refractive_index_needs_length(line):
    ens = EnsembleConfig(n_atoms=10, area=1e-8, sigma0=line.sigma0)
    with pytest.raises(ValueError):
        refractive_index(0.0, ens, 0.0, line, BeamGeometry(area=1e-8))


def test_zero_index_frequency(line, fig2):
    ens, geom = fig2
    zero = zero_index_frequency(line)
    assert line.transition(4, 3) < zero < line.transition(3, 4)
    assert population_index(zero, ens, 0.0, line, geom) == pytest.approx(1.0, abs=1e-15)
    # mid-point of the two clock-state lines when both have equal strength
    mid = 0.5 * (line.transition(4, 3) + line.transition(3, 4))
    assert zero == pytest.approx(mid, rel=1e-9)
    assert float(rad_s_to_mhz(zero)) == pytest.approx(501.6, abs=0.1)


def test_population_index_reduces_to_refractive_index_at_zero_point(line, fig2):
    ens, geom = fig2
    zero = zero_index_frequency(line)
    for fz in (-3e5, 1e5):
        assert population_index(zero, ens, fz, line, geom) - 1 == pytest.approx(
            refractive_index(zero, ens, fz, line, geom) - 1, rel=1e-6)


# --- light shift ----------------------------------------------------------------

def test_light_shift_zero_power(line):
    geom = BeamGeometry.from_waist(20e-6, power=0.0)
    grid = mhz_to_rad_s(np.linspace(-7000, 7000, 57))
    assert np.all(differential_light_shift(grid, line, geom) == 0.0)


def test_light_shift_linear_in_power(line):
    omega = mhz_to_rad_s(np.array([-6000.0, 0.0, 6500.0]))
    one = differential_light_shift(omega, line, BeamGeometry.from_waist(20e-6, power=1e-6))
    three = differential_light_shift(omega, line, BeamGeometry.from_waist(20e-6, power=3e-6))
    np.testing.assert_allclose(three, 3 * one, rtol=1e-14)


def test_light_shift_mirror_antisymmetry(line):
    # far from the other lines, each level's shift flips sign across its own resonance
    geom = BeamGeometry.from_waist(20e-6, power=1e-6)
    for f, fp in ((4, 3), (3, 4)):
        res = line.transition(f, fp)
        off = 3 * line.linewidth
        above = level_light_shift(res + off, f, line, geom)
        below = level_light_shift(res - off, f, line, geom)
        assert np.sign(above) == -np.sign(below)
        assert above == pytest.approx(-below, rel=1e-2)


def test_light_shift_sign_change_on_fig2_grid(line):
    geom = BeamGeometry.from_waist(20e-6, power=1e-6)
    grid = mhz_to_rad_s(np.linspace(-7000, 7000, 1401))
    shift = differential_light_shift(grid, line, geom)
    changes = np.nonzero(np.diff(np.sign(shift)))[0]
    assert changes.size >= 1
    # every sign change brackets a clock-state resonance: the m = 0 pi lines
    # f -> f' = f vanish, so the shift keeps one sign between the groups
    for i in changes:
        lo, hi = grid[i], grid[i + 1]
        assert any(lo <= line.transition(f, fp) <= hi for f, fp in line.active_transitions())


def test_light_shift_positive_between_groups(line):
    geom = BeamGeometry.from_waist(20e-6, power=1e-6)
    pad = 2 * POLE_EXCLUSION * line.linewidth
    grid = np.linspace(line.transition(4, 3) + pad, line.transition(3, 4) - pad, 20001)
    assert np.all(differential_light_shift(grid, line, geom) > 0)


def test_light_shift_rejects_poles(line):
    geom = BeamGeometry.from_waist(20e-6, power=1e-6)
    with pytest.raises(ResonanceError):
        differential_light_shift(line.transition(4, 3), line, geom)
    near = line.transition(3, 4) + 0.5 * POLE_EXCLUSION * line.linewidth
    with pytest.raises(ResonanceError):
        differential_light_shift(near, line, geom)


# --- eta and kappa^2 --------------------------------------------------------------

def test_eta_examples(line, fig6_geometry):
    assert eta_from_geometry(1e9, 0.0, line, fig6_geometry) == 0.0
    a = eta_from_geometry(mhz_to_rad_s(150), 9e7, line, fig6_geometry)
    b = eta_from_geometry(mhz_to_rad_s(150), 18e7, line, fig6_geometry)
    assert b == 2 * a
    assert a == pytest.approx(0.17, rel=0.2)


def test_eta_warns_beyond_perturbative_limit(line, fig6_geometry):
    with pytest.warns(RuntimeWarning, match="perturbative"):
        eta_from_geometry(mhz_to_rad_s(10), 1e9, line, fig6_geometry)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        eta_from_geometry(mhz_to_rad_s(150), 9e7, line, fig6_geometry)
    with pytest.raises(ValueError):
        eta_from_geometry(0.0, -1.0, line, fig6_geometry)


@given(st.floats(min_value=1e6, max_value=1e12), st.floats(min_value=1.0, max_value=100.0))
def test_eta_decreases_with_detuning(delta, factor):
    line = load_line()
    geom = BeamGeometry.from_waist(50e-6)
    near = eta_from_geometry(delta, 1e4, line, geom)
    far = eta_from_geometry(delta * (1 + factor), 1e4, line, geom)
    assert far < near
    assert eta_from_geometry(-delta, 1e4, line, geom) == near


def test_kappa_squared_examples():
    assert kappa_squared(2.0, 3.0, 5.0) == 15.0
    assert kappa_squared(0.0, 3.0, 5.0) == 0.0
    assert kappa_squared(2.0, 0.0, 5.0) == 0.0
    with pytest.raises(ValueError):
        kappa_squared(1.0, -1.0, 1.0)


def test_kappa_squared_matches_d_eta_far_detuned(line, fig6_geometry):
    """kappa^2 = d eta / 2 with the m = 0 pi strength and a balanced interferometer."""
    n_at, n_ph = 1.4e6, 1e9
    d = line.sigma0 * n_at / fig6_geometry.area
    delta = 1e3 * line.linewidth / 2  # x = 1000
    coupling = coupling_constant(delta, line, fig6_geometry)
    eta = eta_from_geometry(delta, n_ph, line, fig6_geometry)
    ratio = kappa_squared(coupling, n_at, n_ph) / (d * eta / 2)
    assert abs(ratio - 1) < 1e-5


def test_cross_coupling_is_small_near_line(line):
    ratio = neglected_cross_coupling(mhz_to_rad_s(150), line, near=(3, 4))
    assert 0 < ratio < 0.05
    assert neglected_cross_coupling(mhz_to_rad_s(150), line, near=(4, 3)) < 0.05


@given(st.floats(min_value=-1e5, max_value=1e5, allow_nan=False))
def test_mhz_round_trip(f_mhz):
    back = float(rad_s_to_mhz(mhz_to_rad_s(f_mhz)))
    assert back == pytest.approx(f_mhz, rel=1e-12, abs=1e-300)
