"""Command-line front end.

Subcommands read a params JSON (plus ``--set key=value`` overrides,
flags win over the file) and write deterministic CSV/JSON artifacts.
Every output embeds the tool version and a hash of the effective
configuration. Exit codes: 0 success, 2 malformed configuration,
3 solver failure, 4 unreachable target.

dB conventions: power ratios use 10 log10, amplitude ratios 20 log10.
The default output directory comes from --out or the KERRDIMER_OUT
environment variable (falling back to the working directory).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import eigenvalue_sweep, gbw_scan, kappa_equivalent, tune_to_bp
from .meanfield import select_branch, solve_double_pump, solve_single_pump
from .model_core import effective_couplings, hybridize
from .noise import added_noise_spectrum
from .response import (
    InstabilityError,
    export_profile_csv,
    gain_profile_floquet,
    phase_sensitive_gain,
)
from .inference import (
    fit_attenuation,
    fit_dephasing,
    fit_kerr,
    fit_pump_powers,
    fit_result_to_dict,
    read_dephasing_csv,
    read_gamma_csv,
    read_profile_csv,
)
from .serialize import (
    TWO_PI,
    circuit_from_dict,
    config_hash,
    load_json,
    pump_config_from_dict,
    save_json,
)
from .stability import drift_matrix

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_UNREACHABLE = 4


class ConfigError(ValueError):
    pass


def _apply_overrides(doc: dict, sets: list[str]) -> dict:
    """Apply --set dotted.key=value overrides on top of the file doc."""
    for item in sets:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, val = item.split("=", 1)
        node = doc
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
        try:
            node[parts[-1]] = json.loads(val)
        except json.JSONDecodeError:
            node[parts[-1]] = val
    return doc


def _load_config(args) -> tuple[dict, object]:
    if not args.params:
        raise ConfigError("--params <file> is required")
    try:
        doc = load_json(args.params)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read params file: {exc}") from exc
    doc = _apply_overrides(doc, args.set or [])
    try:
        params = circuit_from_dict(doc)
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"invalid circuit configuration: {exc}") from exc
    return doc, params


def _pump_config(doc: dict):
    if "gain_tone" not in doc:
        raise ConfigError("params file has no pump configuration (gain_tone)")
    sub = dict(doc)
    sub.setdefault("schema_version", doc.get("schema_version"))
    return pump_config_from_dict(sub)


def _out_dir(args) -> Path:
    out = args.out or os.environ.get("KERRDIMER_OUT") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _provenance(doc: dict) -> dict:
    return {"tool_version": __version__, "config_hash": config_hash(doc)}


def _grid_from_spec(spec: str, default_center=None, default_span=None):
    """Parse --grid f0:f1:points (Hz) into an angular-frequency array."""
    try:
        f0, f1, n = spec.split(":")
        return np.linspace(TWO_PI * float(f0), TWO_PI * float(f1), int(n))
    except ValueError as exc:
        raise ConfigError(f"bad --grid spec {spec!r}, expected f0:f1:points") from exc


def _write_csv(path, header, rows, provenance):
    with open(path, "w", newline="") as fh:
        fh.write(f"# kerrdimer {provenance['tool_version']} "
                 f"config={provenance['config_hash']}\n")
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow(r)


def cmd_hybridize(args):
    doc, params = _load_config(args)
    hyb = hybridize(params)
    out = {
        **_provenance(doc),
        "omega_a_Hz": hyb.omega_a / TWO_PI,
        "omega_b_Hz": hyb.omega_b / TWO_PI,
        "kappa_a_Hz": hyb.kappa_a / TWO_PI,
        "kappa_b_Hz": hyb.kappa_b / TWO_PI,
        "kappa_eq_Hz": kappa_equivalent(hyb.kappa_a, hyb.kappa_b) / TWO_PI,
        "theta_rad": hyb.theta,
        "K_aa_Hz": hyb.K_aa / TWO_PI,
        "K_bb_Hz": hyb.K_bb / TWO_PI,
        "K_ab_Hz": hyb.K_ab / TWO_PI,
        "mu_minus": hyb.mu_minus,
        "mu_plus": hyb.mu_plus,
    }
    path = _out_dir(args) / "hybridize.json"
    save_json(path, out)
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_meanfield(args):
    doc, params = _load_config(args)
    cfg = _pump_config(doc)
    if cfg.conversion_tone is None:
        branches = solve_single_pump(params, cfg.gain_tone)
    else:
        branches = solve_double_pump(params, cfg.gain_tone, cfg.conversion_tone,
                                     seed=args.seed)
    rows = []
    for b in branches:
        rows.append([b.branch_id, repr(float(b.n_L)), repr(float(b.n_R)),
                     repr(float(b.residual)),
                     repr(complex(b.alpha_L_g)), repr(complex(b.alpha_R_g)),
                     repr(complex(b.alpha_L_c) if b.alpha_L_c is not None else 0j),
                     repr(complex(b.alpha_R_c) if b.alpha_R_c is not None else 0j)])
    path = _out_dir(args) / "meanfield.csv"
    _write_csv(path, ["branch_id", "n_L", "n_R", "residual",
                      "alpha_L_g", "alpha_R_g", "alpha_L_c", "alpha_R_c"],
               rows, _provenance(doc))
    print(f"{len(branches)} branch(es) -> {path}")
    return EXIT_OK


def cmd_stability(args):
    doc = load_json(args.params) if args.params else {"schema_version": 1}
    doc = _apply_overrides(doc, args.set or [])
    lo, hi, n = (args.sweep_gap or "-2:2:401").split(":")
    gaps = np.linspace(float(lo), float(hi), int(n))
    kappa = TWO_PI * float(doc.get("kappa_Hz", 1.0)) if "kappa_Hz" in doc else 1.0
    rows = []
    for rec in eigenvalue_sweep(kappa, gaps):
        ev = rec["eigenvalues"]
        c_t = max(rec["gap"], 0.0)
        c_b = max(-rec["gap"], 0.0)
        rows.append([repr(float(c_t)), repr(float(c_b))]
                    + [repr(float(x))
                       for pair in ((e.real, e.imag) for e in ev) for x in pair]
                    + [rec["classification"]])
    path = _out_dir(args) / "stability_sweep.csv"
    header = (["C_TMS", "C_BS"]
              + [f"{p}_ev{i}" for i in range(4) for p in ("re", "im")]
              + ["classification"])
    _write_csv(path, header, rows, _provenance(doc))
    print(f"{len(rows)} points -> {path}")
    return EXIT_OK


def cmd_gain(args):
    doc, params = _load_config(args)
    cfg = _pump_config(doc)
    if args.model == "quadrature":
        raise ConfigError("quadrature gain profiles are driven from coupling "
                          "space; use the gbw subcommand or the library API")
    if cfg.conversion_tone is None:
        mf = select_branch(solve_single_pump(params, cfg.gain_tone))
    else:
        mf = select_branch(solve_double_pump(params, cfg.gain_tone,
                                             cfg.conversion_tone, seed=args.seed))
    if args.grid:
        grid = _grid_from_spec(args.grid)
    else:
        from .model_core import kerr_shifted_frequencies
        _, wt_b = kerr_shifted_frequencies(params, mf)
        grid = np.linspace(wt_b - 3 * params.kappa, wt_b + 3 * params.kappa, 2001)
    prof = gain_profile_floquet(params, mf, grid, N=args.floquet_order)
    path = _out_dir(args) / "gain_profile.csv"
    export_profile_csv(path, prof)
    meta = {
        **_provenance(doc),
        "G0_dB": prof.G0_db, "f_peak_Hz": prof.f_peak / TWO_PI,
        "bandwidth_Hz": prof.bandwidth_3db / TWO_PI,
        "n_peaks": prof.n_peaks, "model_tag": prof.model_tag,
    }
    save_json(_out_dir(args) / "gain_profile.json", meta)
    print(json.dumps(meta, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_noise(args):
    doc = load_json(args.params)
    doc = _apply_overrides(doc, args.set or [])
    try:
        c_t = float(doc["C_TMS"])
        c_b = float(doc["C_BS"])
        kappa = TWO_PI * float(doc.get("kappa_Hz", 1.0 / TWO_PI))
    except KeyError as exc:
        raise ConfigError(f"noise needs C_TMS and C_BS in the params file ({exc})")
    from .analysis import balanced_couplings
    from .noise import export_noise_csv

    c = balanced_couplings(c_t, c_b, kappa)
    dm = drift_matrix(c, kappa)
    grid = (_grid_from_spec(args.grid) if args.grid
            else np.linspace(-3 * kappa, 3 * kappa, 1001))
    spec = added_noise_spectrum(dm, kappa, grid)
    path = _out_dir(args) / "noise.csv"
    export_noise_csv(path, spec)
    print(f"noise spectrum -> {path}")
    return EXIT_OK


def cmd_gbw(args):
    doc = load_json(args.params) if args.params else {"schema_version": 1}
    doc = _apply_overrides(doc, args.set or [])
    targets = [float(x) for x in args.g0.split(",")]
    params = None
    if args.model == "floquet":
        params = circuit_from_dict(doc)
    rows_out = []
    try:
        records = gbw_scan(args.mode, targets, model=args.model, params=params)
    except InstabilityError as exc:
        _fail(str(exc), EXIT_UNREACHABLE)
    for r in records:
        rows_out.append([repr(float(r["G0_dB"])), repr(float(r["BW"] / TWO_PI)),
                         r["mode"], repr(float(r.get("gap", float("nan"))))])
    path = _out_dir(args) / "gbw_scan.csv"
    _write_csv(path, ["G0_dB", "BW_Hz", "mode", "gap"], rows_out, _provenance(doc))
    print(f"{len(rows_out)} records -> {path}")
    return EXIT_OK


def cmd_tune_bp(args):
    doc, params = _load_config(args)
    cfg = _pump_config(doc)
    try:
        p_g, p_c, freqs, diag = tune_to_bp(params, cfg.gain_tone, args.target_g0,
                                           seed=args.seed)
    except InstabilityError as exc:
        _fail(str(exc), EXIT_UNREACHABLE)
    out = {
        **_provenance(doc),
        "P_g_W": p_g, "P_c_W": p_c,
        "omega_g_Hz": freqs[0] / TWO_PI, "omega_c_Hz": freqs[1] / TWO_PI,
        "gap": diag["gap"], "G0_dB": diag["G0_dB"],
        "bandwidth_Hz": diag["bandwidth"] / TWO_PI,
        "pump_power_ratio": diag.get("pump_power_ratio"),
        "evals": diag["evals"], "converged": diag["converged"],
    }
    save_json(_out_dir(args) / "tune_bp.json", out)
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_phase_gain(args):
    doc, params = _load_config(args)
    cfg = _pump_config(doc)
    if cfg.conversion_tone is None:
        raise ConfigError("phase-gain needs a two-pump configuration")
    mf = select_branch(solve_double_pump(params, cfg.gain_tone,
                                         cfg.conversion_tone, seed=args.seed))
    c = effective_couplings(params, mf, frame="two-pump")
    dm = drift_matrix(c, params.kappa)
    g_max, g_min, mod = phase_sensitive_gain(dm, params.kappa, 0.0)
    out = {
        **_provenance(doc),
        "G_max_dB": 10 * math.log10(g_max),
        "G_min_dB": 10 * math.log10(g_min),
        "modulation_dB": 10 * math.log10(mod),
    }
    save_json(_out_dir(args) / "phase_gain.json", out)
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_fit_kerr(args):
    doc, params = _load_config(args)
    data = read_gamma_csv(args.data)
    fr = fit_kerr(data, params)
    out = {**_provenance(doc), **fit_result_to_dict(fr)}
    save_json(_out_dir(args) / "fit_kerr.json", out)
    print(json.dumps(out["parameters"], indent=2, sort_keys=True))
    return EXIT_OK


def cmd_fit_atten(args):
    doc, params = _load_config(args)
    profiles = []
    for spec in args.data.split(","):
        p_set, path = spec.split("@")
        prof = read_profile_csv(path)
        prof["P_set_dBm"] = float(p_set)
        profiles.append(prof)
    pump_freq = TWO_PI * float(doc["pump_freq_Hz"]) if "pump_freq_Hz" in doc else \
        _pump_config(doc).gain_tone.frequency
    fr = fit_attenuation(profiles, params, pump_freq)
    out = {**_provenance(doc), **fit_result_to_dict(fr)}
    save_json(_out_dir(args) / "fit_atten.json", out)
    print(json.dumps(out["parameters"], indent=2, sort_keys=True))
    return EXIT_OK


def cmd_fit_pumps(args):
    doc, params = _load_config(args)
    cfg = _pump_config(doc)
    prof = read_profile_csv(args.data)
    prof["omega_g"] = cfg.gain_tone.frequency
    prof["omega_c"] = cfg.conversion_tone.frequency
    fr = fit_pump_powers(prof, params, attenuation_db=cfg.attenuation_db)
    out = {**_provenance(doc), **fit_result_to_dict(fr)}
    save_json(_out_dir(args) / "fit_pumps.json", out)
    print(json.dumps(out["parameters"], indent=2, sort_keys=True))
    return EXIT_OK


def cmd_calibrate(args):
    doc = load_json(args.params)
    doc = _apply_overrides(doc, args.set or [])
    try:
        kappa_r = TWO_PI * float(doc["kappa_r_Hz"])
    except KeyError:
        raise ConfigError("calibrate needs kappa_r_Hz in the params file")
    data = read_dephasing_csv(args.data)
    fr = fit_dephasing(data, kappa_r)
    out = {**_provenance(doc), **fit_result_to_dict(fr)}
    save_json(_out_dir(args) / "calibrate.json", out)
    print(json.dumps(out["parameters"], indent=2, sort_keys=True))
    return EXIT_OK


def _fail(message, code):
    print(json.dumps({"error": message, "exit_code": code}), file=sys.stdout)
    raise SystemExit(code)


def build_parser():
    p = argparse.ArgumentParser(
        prog="kerrdimer",
        description="Kerr dimer amplifier modeling and inference. "
                    "Power ratios in dB use 10*log10, amplitude ratios 20*log10.")
    p.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--params", help="params JSON file")
    common.add_argument("--out", help="output directory (or $KERRDIMER_OUT)")
    common.add_argument("--set", action="append",
                        help="override config key, e.g. --set circuit.J_Hz=9.5e7")
    common.add_argument("--model", choices=["quadrature", "floquet"],
                        default="floquet")
    common.add_argument("--floquet-order", type=int, default=2, dest="floquet_order")
    common.add_argument("--grid", help="frequency grid f0:f1:points (Hz)")
    common.add_argument("--threads", type=int, default=0,
                        help="parallelism cap (results are N-independent)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--emit-plot-data", action="store_true",
                        dest="emit_plot_data")

    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("hybridize", parents=[common]).set_defaults(func=cmd_hybridize)
    sub.add_parser("meanfield", parents=[common]).set_defaults(func=cmd_meanfield)
    sp = sub.add_parser("stability", parents=[common])
    sp.add_argument("--sweep-gap", dest="sweep_gap", help="lo:hi:points")
    sp.set_defaults(func=cmd_stability)
    sub.add_parser("gain", parents=[common]).set_defaults(func=cmd_gain)
    sub.add_parser("noise", parents=[common]).set_defaults(func=cmd_noise)
    gb = sub.add_parser("gbw", parents=[common])
    gb.add_argument("--mode", choices=["SP", "EP", "BP"], required=True)
    gb.add_argument("--g0", required=True, help="comma-separated dB targets")
    gb.set_defaults(func=cmd_gbw, model="quadrature")
    tb = sub.add_parser("tune-bp", parents=[common])
    tb.add_argument("--target-g0", dest="target_g0", type=float, required=True)
    tb.set_defaults(func=cmd_tune_bp)
    sub.add_parser("phase-gain", parents=[common]).set_defaults(func=cmd_phase_gain)
    fk = sub.add_parser("fit-kerr", parents=[common])
    fk.add_argument("--data", required=True, help="gamma CSV")
    fk.set_defaults(func=cmd_fit_kerr)
    fa = sub.add_parser("fit-atten", parents=[common])
    fa.add_argument("--data", required=True,
                    help="comma list of P_set_dBm@profile.csv")
    fa.set_defaults(func=cmd_fit_atten)
    fp = sub.add_parser("fit-pumps", parents=[common])
    fp.add_argument("--data", required=True, help="profile CSV")
    fp.set_defaults(func=cmd_fit_pumps)
    cal = sub.add_parser("calibrate", parents=[common])
    cal.add_argument("--data", required=True, help="dephasing CSV")
    cal.set_defaults(func=cmd_calibrate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        _fail(f"configuration error: {exc}", EXIT_CONFIG)
    except SystemExit:
        raise
    except (RuntimeError, ValueError, OSError) as exc:
        _fail(f"solver failure: {exc}", EXIT_SOLVER)


if __name__ == "__main__":
    sys.exit(main())
