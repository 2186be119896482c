"""Command-line front end.

    qndsqueeze spectrum     --config fig2.json [--out table.csv]
    qndsqueeze squeeze      --config fig4.json [--scheme mz1|mz2|am] [--formula ...]
    qndsqueeze sweep        --config sweep.json [--formula cycling]
    qndsqueeze optimize     --config opt.json [--depth 100]
    qndsqueeze oracle-check [--config oracle.json]

``--config`` also accepts the name of a bundled scenario (fig2, fig4, fig6,
sweep_single, sweep_cycling, sweep_two_colour). Exit status: 0 success,
1 computation error, 2 configuration error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import atomic, decoherence, oracle
from .atomic import BeamGeometry, EnsembleConfig, mhz_to_rad_s, rad_s_to_mhz
from .schemes import Scheme, SchemeConfig, SchemeError, detect

EXIT_OK, EXIT_COMPUTE, EXIT_CONFIG = 0, 1, 2

DEFAULT_FORMULA = {"mz1": "single_D1", "mz2": "two_colour_D1", "am": "two_colour_D1"}
FORMULA_CHOICES = ["single-d1", "cycling", "two-colour-d1"]


class ConfigError(ValueError):
    pass


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return "%.10g" % value


def _json_value(value):
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    return value


def write_table(rows, columns, fmt_name: str, stream, comments=()):
    if fmt_name == "csv":
        for line in comments:
            stream.write(f"# {line}\n")
        stream.write(",".join(columns) + "\n")
        for row in rows:
            stream.write(",".join(fmt(row.get(c)) for c in columns) + "\n")
    else:
        for row in rows:
            stream.write(json.dumps({c: _json_value(row.get(c)) for c in columns}, sort_keys=False) + "\n")


# --- config helpers -----------------------------------------------------------

def load_config(spec: str | None) -> dict:
    if spec is None:
        return {}
    path = Path(spec)
    try:
        if path.exists():
            text = path.read_text()
        else:
            name = spec if spec.endswith(".json") else spec + ".json"
            text = resources.files("qndsqueeze").joinpath("scenarios", name).read_text()
    except (FileNotFoundError, OSError) as exc:
        raise ConfigError(f"cannot read config {spec!r}: {exc}") from None
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {spec!r} is not valid JSON: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    return cfg


def _get(cfg: dict, key: str, default=None, required: bool = False):
    if key in cfg and cfg[key] is not None:
        return cfg[key]
    if required:
        raise ConfigError(f"missing config key {key!r}")
    return default


def _number(cfg: dict, key: str, default=None, required=False, positive=False):
    value = _get(cfg, key, default, required)
    if value is None:
        return None
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key!r} must be a number") from None
    if not math.isfinite(value) or (positive and value <= 0):
        raise ConfigError(f"{key!r} must be {'positive and ' if positive else ''}finite")
    return value


def make_grid(spec: dict) -> np.ndarray:
    if not isinstance(spec, dict):
        raise ConfigError("grid must be an object with start/stop/num/spacing or values")
    if "values" in spec:
        values = np.asarray(spec["values"], dtype=float)
    else:
        num = int(_number(spec, "num", required=True))
        start = _number(spec, "start", required=True)
        stop = _number(spec, "stop", required=True)
        spacing = spec.get("spacing", "linear")
        if num < 0:
            raise ConfigError("grid num must be non-negative")
        if spacing == "log":
            if start <= 0 or stop <= 0:
                raise ConfigError("log grids need positive endpoints")
            values = np.geomspace(start, stop, num)
        elif spacing == "linear":
            values = np.linspace(start, stop, num)
        else:
            raise ConfigError(f"unknown grid spacing {spacing!r}")
    if values.size == 0:
        raise ConfigError("grid is empty")
    if values.size > 1 and not (np.all(np.diff(values) > 0) or np.all(np.diff(values) < 0)):
        raise ConfigError("grid must be strictly monotone")
    return values


def load_line(cfg: dict):
    try:
        return atomic.load_line(cfg.get("constants"))
    except (OSError, KeyError, ValueError) as exc:
        raise ConfigError(f"bad constants table: {exc}") from None


def make_geometry(cfg: dict) -> BeamGeometry:
    power = _number(cfg, "power_w", 0.0)
    if "waist_um" in cfg:
        return BeamGeometry.from_waist(_number(cfg, "waist_um", positive=True) * 1e-6, power=power)
    if "radius_um" in cfg:
        return BeamGeometry.from_waist(_number(cfg, "radius_um", positive=True) * 1e-6, power=power)
    if "area_m2" in cfg:
        return BeamGeometry(area=_number(cfg, "area_m2", positive=True), power=power)
    raise ConfigError("beam geometry needs waist_um, radius_um or area_m2")


def make_ensemble(cfg: dict, geom: BeamGeometry, line) -> EnsembleConfig:
    density = _number(cfg, "density_cm3", positive=True)
    density = None if density is None else density * 1e6
    length = _number(cfg, "length_m", positive=True)
    n_atoms = _number(cfg, "n_atoms")
    try:
        if n_atoms is None:
            if density is None or length is None:
                raise ConfigError("ensemble needs n_atoms or density_cm3 and length_m")
            return EnsembleConfig.from_density(density, length, geom.area, line)
        return EnsembleConfig(n_atoms=n_atoms, area=geom.area, sigma0=line.sigma0,
                              density=density, length=length)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


# --- verbs ----------------------------------------------------------------------

def run_spectrum(cfg: dict, args, out) -> int:
    line = load_line(cfg)
    geom = make_geometry(cfg)
    ens_cfg = dict(cfg)
    ens_cfg.setdefault("length_m", 1e-2)
    ens = make_ensemble(ens_cfg, geom, line)
    mean_fz = _number(cfg, "mean_fz", 0.0)
    freqs = make_grid(_get(cfg, "grid", required=True))
    zero = atomic.zero_index_frequency(line)
    rows = []
    for f_mhz in freqs:
        omega = float(mhz_to_rad_s(f_mhz))
        row = {"freq_mhz_rel": f_mhz,
               "n_refractive": atomic.population_index(omega, ens, mean_fz, line, geom)}
        try:
            row["light_shift_hz"] = atomic.differential_light_shift(omega, line, geom) / (2 * math.pi)
        except atomic.ResonanceError:
            row["light_shift_hz"] = "ERR_RESONANCE"
        rows.append(row)
    comments = [f"constants={line.version}",
                f"zero_index_freq_mhz_rel={fmt(float(rad_s_to_mhz(zero)))}"]
    write_table(rows, ["freq_mhz_rel", "n_refractive", "light_shift_hz"], args.format or "csv", out, comments)
    return EXIT_OK


def _probe_detuning(probe: dict, line) -> float:
    value = _get(probe, "detuning_mhz", required=True)
    if value == "zero-index":
        return atomic.zero_index_frequency(line) - line.transition(4, 3)
    try:
        return float(mhz_to_rad_s(float(value)))
    except (TypeError, ValueError):
        raise ConfigError("detuning_mhz must be a number or 'zero-index'") from None


def squeeze_report(cfg: dict, scheme_name: str | None = None, formula: str | None = None) -> dict:
    line = load_line(cfg)
    try:
        scheme = Scheme(scheme_name or _get(cfg, "scheme", "mz1"))
    except ValueError:
        raise ConfigError(f"unknown scheme {cfg.get('scheme')!r}") from None
    fid = decoherence.formula_id(formula or _get(cfg, "formula", DEFAULT_FORMULA[scheme.value]))
    ensemble = _get(cfg, "ensemble", required=True)
    probe = _get(cfg, "probe", {})
    geom = make_geometry(ensemble)
    ens = make_ensemble(ensemble, geom, line)
    report = {"scheme": scheme.value, "formula": fid, "constants": line.version,
              "n_atoms": ens.n_atoms, "optical_depth": ens.d}

    eta = _number(cfg, "eta")
    if probe:
        n_ph = _number(probe, "n_ph", required=True, positive=True)
        detuning = _probe_detuning(probe, line)
        report["detuning_mhz"] = float(rad_s_to_mhz(detuning))
        if scheme is Scheme.AMPLITUDE_MODULATED:
            sideband = float(mhz_to_rad_s(_number(probe, "sideband_mhz", required=True, positive=True)))
            sc_cfg = SchemeConfig.from_detunings(scheme, line, geom, n_ph3=n_ph, n_ph4=n_ph,
                                                 detuning34=detuning, detuning43=detuning,
                                                 sideband3=sideband, sideband4=sideband)
            # all light traverses the atoms; each sideband carries half the photons
            geo_eta = sum(atomic.eta_from_geometry(detuning + s * sideband / 2, n_ph / 2, line, geom, arm_fraction=1.0)
                          for s in (1, -1))
        else:
            kwargs = {"n_ph4": n_ph, "detuning34": detuning}
            if scheme is Scheme.TWO_COLOUR_MZ:
                kwargs.update(n_ph3=n_ph, detuning43=detuning)
            sc_cfg = SchemeConfig.from_detunings(scheme, line, geom, **kwargs)
            geo_eta = atomic.eta_from_geometry(detuning, n_ph, line, geom)
        detection = detect(sc_cfg, ens.n_atoms)
        report.update(n_ph=n_ph, coupling=sc_cfg.coupling4, eta_geometry=geo_eta,
                      detector_variance=detection.variance, kappa2_detector=detection.kappa2, shot_noise=detection.shot_noise,
                      cross_coupling=sc_cfg.cross_coupling(line))
        if eta is None:
            eta = geo_eta
    if eta is None:
        raise ConfigError("give either a probe block or an explicit eta")
    result = decoherence.squeezing(fid, ens.d, eta)
    report.update(eta=result.eta, kappa2=result.kappa2, xi2=result.xi2,
                  xi2_coherent=1.0 / (1.0 + result.kappa2))
    return report


def run_squeeze(cfg: dict, args, out) -> int:
    report = squeeze_report(cfg, args.scheme, args.formula)
    _emit_record(report, args.format, out)
    return EXIT_OK


def _emit_record(record: dict, fmt_name: str | None, out):
    if (fmt_name or "json") == "csv":
        write_table([record], list(record), "csv", out)
    else:
        out.write(json.dumps({k: _json_value(v) for k, v in record.items()}) + "\n")


def run_sweep(cfg: dict, args, out) -> int:
    fid = decoherence.formula_id(args.formula or _get(cfg, "formula", required=True))
    grid = make_grid(_get(cfg, "grid", required=True))
    sweep = decoherence.sweep_depth(fid, np.sort(grid))
    write_table(sweep.rows(), ["d", "eta_opt", "xi2_min", "xi2_asymptote"], args.format or "csv", out)
    return EXIT_OK


def run_optimize(cfg: dict, args, out) -> int:
    fid = decoherence.formula_id(args.formula or _get(cfg, "formula", required=True))
    d = args.depth if args.depth is not None else _number(cfg, "optical_depth", required=True, positive=True)
    eta, xi2 = decoherence.optimize_eta(fid, d)
    record = {"formula": fid, "d": d, "eta_opt": eta, "xi2_min": xi2,
              "eta_asymptote": decoherence.eta_asymptote(fid, d),
              "xi2_asymptote": decoherence.asymptote(fid, d)}
    if fid == "cycling":
        record["eta_closed_form"] = decoherence.eta_opt_cycling(d)
    _emit_record(record, args.format, out)
    return EXIT_OK


def oracle_checks(cfg: dict) -> list[dict]:
    n_at = int(_number(cfg, "n_atoms", 100))
    n_ph = _number(cfg, "n_ph", 1e4)
    kappa2 = _number(cfg, "kappa2", 0.25)
    tol = _number(cfg, "tolerance", 1e-2)
    post_n_at = int(_number(cfg, "posterior_n_atoms", 1e4))
    post_n_ph = _number(cfg, "posterior_n_ph", 1e6)
    rows = []

    def add(name, formula_value, oracle_value, tolerance):
        rel = abs(oracle_value - formula_value) / abs(formula_value)
        rows.append({"test": name, "formula_value": formula_value, "oracle_value": oracle_value,
                     "relative_error": rel, "pass": bool(rel < tolerance)})

    k = oracle.coupling_for_kappa2(kappa2, n_at, n_ph)
    add("single_probe_output_variance", n_ph / 4 * (1 + kappa2), oracle.exact_output_variance(n_at, n_ph, k), tol)

    k4 = oracle.two_colour_coupling_for_kappa2(kappa2, n_at, n_ph)
    two = 2 * n_ph * (1 + 2 * kappa2 * (1 + n_at / (2 * n_ph)))
    add("two_colour_difference_current", two, oracle.exact_two_colour_variance(n_at, n_ph, k4), tol)

    for k2, tol_post in ((1.0, 0.02), (3.0, 0.03)):
        kp = oracle.coupling_for_kappa2(k2, post_n_at, post_n_ph)
        add(f"conditional_variance_kappa2_{k2:g}", post_n_at / 4 / (1 + k2),
            oracle.posterior_conditional_variance(post_n_at, post_n_ph, kp), tol_post)
    return rows


def run_oracle_check(cfg: dict, args, out) -> int:
    rows = oracle_checks(cfg)
    write_table(rows, ["test", "formula_value", "oracle_value", "relative_error", "pass"], args.format or "json", out)
    return EXIT_OK if all(r["pass"] for r in rows) else EXIT_COMPUTE


VERBS = {
    "spectrum": run_spectrum,
    "squeeze": run_squeeze,
    "sweep": run_sweep,
    "optimize": run_optimize,
    "oracle-check": run_oracle_check,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qndsqueeze", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in VERBS:
        p = sub.add_parser(verb)
        p.add_argument("--config", help="JSON config path or bundled scenario name")
        p.add_argument("--out", help="output file (default stdout)")
        p.add_argument("--format", choices=["csv", "json"])
        p.add_argument("--formula", choices=FORMULA_CHOICES)
        p.add_argument("--scheme", choices=[s.value for s in Scheme])
        if verb == "optimize":
            p.add_argument("--depth", type=float, help="optical depth d")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    buffer = io.StringIO()
    try:
        cfg = load_config(args.config)
        if args.verb != "oracle-check" and not cfg:
            raise ConfigError(f"{args.verb} needs --config")
        status = VERBS[args.verb](cfg, args, buffer)
    except (ConfigError, KeyError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, ArithmeticError, RuntimeError, SchemeError) as exc:
        print(f"computation error: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    text = buffer.getvalue()
    if args.out:
        with open(args.out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
