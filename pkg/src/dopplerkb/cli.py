"""Command-line entry point: ``dopplerkb {synth,fit,hyperfine,report,bias,bootstrap}``.

Exit codes: 0 success, 2 config or input error, 3 numerical failure.
"""

import argparse
import os
import sys

import numpy as np

from . import constants, hyperfine, io, thermometry
from .fitting import (
    BracketError,
    bootstrap_width_error,
    fit_spectrum,
    read_fits_jsonl,
    search_g,
    subset_consistency,
    uncertainty_vs_time,
    write_fits_jsonl,
)
from .lineshape import LineShapeParams
from .optim import FitFailure
from .specfun import ConvergenceError
from .synth import iter_campaign

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _g_bracket(text):
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected lo,hi in Hz/Pa") from exc
    if not 0 <= lo < hi:
        raise argparse.ArgumentTypeError("need 0 <= lo < hi")
    return [lo, hi]


def _float_list(text):
    try:
        return [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected comma-separated numbers") from exc


def _reference(run):
    c = run.campaign
    return thermometry.LineReference(c.nu0, c.molecular_mass, c.temperature)


def _workers(args):
    return args.workers if args.workers else (os.cpu_count() or 1)


def _model(args):
    return "galatry" if args.model == "galatry" else "voigt"


def _echo(text):
    print(text, flush=True)


# --- subcommands --------------------------------------------------------------------


def cmd_synth(args):
    run = io.load_run_config(args.config)
    manifest = io.write_campaign(iter_campaign(run.campaign, args.seed), args.out, run, args.seed)
    _echo(f"wrote {len(manifest['files'])} spectra to {args.out}")
    return EXIT_OK


def _fit_config_for(args, manifest):
    if args.config:
        return io.load_run_config(args.config)
    return io.RunConfig.from_dict(manifest["config"])


def cmd_fit(args):
    spectra, manifest = io.read_campaign(args.campaign)
    run = _fit_config_for(args, manifest)
    bracket = args.g_bracket or run.analysis["g_bracket"]
    res = search_g(spectra, _model(args), bracket, run.fit, workers=_workers(args))
    ref = _reference(run)
    kb = thermometry.kb_from_width(res.width_mean, ref)
    # g* uncertainty included; the scatter-only figure is kept alongside
    rel = 2.0 * res.width_sigma_total / res.width_mean
    os.makedirs(args.out, exist_ok=True)
    fits_path = os.path.join(args.out, "fits.jsonl")
    write_fits_jsonl(res.per_spectrum, fits_path)
    summary = res.summary()
    summary.update(
        {
            "kb_j_per_k": kb,
            "kb_rel_sigma": rel,
            "kb_rel_sigma_scatter": 2.0 * res.width_sigma / res.width_mean,
            "reference": {"nu0_hz": ref.nu0, "molecular_mass_kg": ref.molecular_mass, "temperature_k": ref.temperature},
            "fits_file": "fits.jsonl",
            "config": run.to_dict(),
        }
    )
    io.dump_json(summary, os.path.join(args.out, "campaign.json"))
    _echo(f"model {res.model}: g* = {res.g_star:.6g} Hz/Pa, slope {res.slope_at_g_star:+.3g} +/- {res.slope_error:.3g} Hz/Pa")
    _echo(
        f"width = {res.width_mean:.2f} Hz, scatter sigma {res.width_sigma:.2f} Hz ({res.width_sigma / res.width_mean * 1e6:.2f} ppm), "
        f"with g* error {res.width_sigma_total:.2f} Hz, dispersion ratio {res.dispersion_ratio:.3f}"
    )
    _echo(f"k_B = {kb:.7e} J/K ({rel * 1e6:.1f} ppm)")
    return EXIT_OK


def cmd_hyperfine(args):
    lower, upper = io.load_hyperfine_constants(args.config)
    width = args.envelope_width or thermometry.width_from_kb(constants.K_B_CODATA2006)
    sticks = hyperfine.stick_spectrum(lower, upper, exact=args.exact)
    env = LineShapeParams(doppler_hwhm_e=width)
    corr = hyperfine.broadening_correction(sticks, env, model=_model(args))
    os.makedirs(args.out, exist_ok=True)
    hyperfine.write_stick_csv(sticks, os.path.join(args.out, "sticks.csv"))
    n_eff = len(np.unique(np.round(sticks.offsets[sticks.intensities > 0])))
    report = {
        "envelope_width_hz": width,
        "model": _model(args),
        "n_lines": len(sticks),
        "n_effective_sticks": int(n_eff),
        "center_of_gravity_hz": sticks.center_of_gravity,
        "width_ppm": corr.width_ppm,
        "kb_ppm": corr.kb_ppm,
        "weak_fraction": corr.weak_fraction,
    }
    io.dump_json(report, os.path.join(args.out, "hyperfine_report.json"))
    _echo(f"{len(sticks)} lines, {n_eff} distinct positions")
    _echo(f"width broadening {corr.width_ppm:.3f} ppm, k_B correction {corr.kb_ppm:.3f} ppm, weak fraction {corr.weak_fraction:.3f}")
    return EXIT_OK


def _budget_table(ledger):
    rows = [f"{'effect':<64} {'width ppm':>10} {'u(width)':>10} {'k_B ppm':>10} {'u(k_B)':>10}  kind"]
    for e in ledger.entries:
        rows.append(
            f"{e.name[:64]:<64} {e.width_ppm:>10.4g} {e.width_uncertainty_ppm:>10.4g} "
            f"{e.kb_ppm:>10.4g} {e.kb_uncertainty_ppm:>10.4g}  {e.kind}{' (/sqrt3)' if e.kind == 'bound' else ''}"
        )
    return "\n".join(rows)


def cmd_report(args):
    summary = io.load_json(args.summary)
    for key in ("kb_j_per_k", "kb_rel_sigma"):
        if key not in summary:
            raise io.ConfigError(f"{args.summary}: missing '{key}'")
    ledger = io.load_ledger(args.ledger) if args.ledger else thermometry.default_ledger()
    kb_raw = float(summary["kb_j_per_k"])
    stat = float(summary["kb_rel_sigma"])
    kb, sys_rel = thermometry.apply_ledger(kb_raw, ledger)
    total = float(np.hypot(stat, sys_rel))
    _echo(_budget_table(ledger))
    _echo(f"k_B raw       = {kb_raw:.7e} J/K")
    _echo(f"k_B corrected = {kb:.7e} J/K  (stat {stat * 1e6:.1f} ppm, syst {sys_rel * 1e6:.1f} ppm, combined {total * 1e6:.1f} ppm)")
    out = {
        "kb_raw": kb_raw,
        "kb_corrected": kb,
        "stat_rel": stat,
        "syst_rel": sys_rel,
        "combined_rel": total,
        "ledger": ledger.to_list(),
    }
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        io.dump_json(out, os.path.join(args.out, "report.json"))
        fits_file = summary.get("fits_file")
        if fits_file:
            fits = read_fits_jsonl(os.path.join(os.path.dirname(os.path.abspath(args.summary)), fits_file))
            analysis = io.RunConfig.from_dict(summary["config"]).analysis if "config" in summary else io.RunConfig().analysis
            sub = subset_consistency(fits, analysis["n_subsets"], args.seed)
            io.write_table_csv(
                os.path.join(args.out, "subsets.csv"),
                ["subset", "width_mean_hz", "width_sigma_hz"],
                [(i, m, s) for i, (m, s) in enumerate(sub.subsets)],
            )
            curve = uncertainty_vs_time(fits, analysis["per_fit_duration_s"], args.seed)
            io.write_table_csv(os.path.join(args.out, "uncertainty_vs_time.csv"), ["tau_s", "rel_uncertainty"], curve.tolist())
    return EXIT_OK


def cmd_bias(args):
    spectra, manifest = io.read_campaign(args.campaign)
    run = _fit_config_for(args, manifest)
    bracket = args.g_bracket or run.analysis["g_bracket"]
    grid = args.p_max or run.analysis["p_max_grid"]
    points = thermometry.voigt_galatry_bias(
        spectra, grid, run.fit, bracket, ref=_reference(run), shared_g=args.shared_g, workers=_workers(args)
    )
    os.makedirs(args.out, exist_ok=True)
    io.write_bias_csv(points, os.path.join(args.out, "bias.csv"))
    curve = thermometry.simulated_bias_curve(grid, run.campaign, run.fit, _reference(run))
    io.write_table_csv(os.path.join(args.out, "bias_theory.csv"), ["pressure_pa", "bias_ppm"], curve.tolist())
    for b in points:
        _echo(f"p_max {b.p_max:5.2f} Pa: bias {b.bias_ppm:+9.2f} ppm (sigma {b.sigma_ppm:.1f} ppm, n={b.n_spectra})")
    return EXIT_OK


def cmd_bootstrap(args):
    spectra, manifest = io.read_campaign(args.campaign)
    run = _fit_config_for(args, manifest)
    if not 0 <= args.index < len(spectra):
        raise io.ConfigError(f"index {args.index} outside 0..{len(spectra) - 1}")
    s = spectra[args.index]
    g = args.g if args.g is not None else run.campaign.g_truth
    fit = fit_spectrum(s, g, _model(args), run.fit)
    sb = bootstrap_width_error(s, g, _model(args), args.replicates, args.seed, run.fit)
    _echo(f"covariance error {fit.width_error:.3f} Hz, bootstrap {sb:.3f} Hz, ratio {sb / fit.width_error:.3f}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        io.dump_json(
            {"index": args.index, "g": g, "width_hz": fit.width, "covariance_sigma_hz": fit.width_error, "bootstrap_sigma_hz": sb, "replicates": args.replicates, "seed": args.seed},
            os.path.join(args.out, "bootstrap.json"),
        )
    return EXIT_OK


# --- parser -------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run config JSON (version 1)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--model", choices=("voigt", "galatry"), default="galatry")
    common.add_argument("--g-bracket", type=_g_bracket, default=None, metavar="LO,HI")
    common.add_argument("--workers", type=int, default=0, help="parallel fit processes (default: all cores)")
    common.add_argument("--out", help="output directory")

    p = argparse.ArgumentParser(prog="dopplerkb", description="Doppler-broadening thermometry on synthetic spectra.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("synth", parents=[common], help="generate a synthetic campaign")
    s.set_defaults(func=cmd_synth, out_required=True)

    s = sub.add_parser("fit", parents=[common], help="shared-g campaign fit")
    s.add_argument("campaign", help="campaign directory with manifest.json")
    s.set_defaults(func=cmd_fit, out_required=True)

    s = sub.add_parser("hyperfine", parents=[common], help="stick spectrum and broadening correction")
    s.add_argument("--envelope-width", type=float, default=None, help="Doppler e-fold half-width (Hz)")
    s.add_argument("--exact", action="store_true", help="diagonalise instead of first order")
    s.set_defaults(func=cmd_hyperfine, out_required=True)

    s = sub.add_parser("report", parents=[common], help="apply the error budget to a campaign summary")
    s.add_argument("summary", help="campaign.json written by 'fit'")
    s.add_argument("--ledger", help="ledger JSON (default: built-in budget)")
    s.set_defaults(func=cmd_report, out_required=False)

    s = sub.add_parser("bias", parents=[common], help="Voigt versus Galatry k_B difference")
    s.add_argument("campaign")
    s.add_argument("--p-max", type=_float_list, default=None, metavar="P1,P2,...")
    s.add_argument("--shared-g", action="store_true", help="Voigt reuses the Galatry g*")
    s.set_defaults(func=cmd_bias, out_required=True)

    s = sub.add_parser("bootstrap", parents=[common], help="bootstrap width error of one spectrum")
    s.add_argument("campaign")
    s.add_argument("--index", type=int, default=0)
    s.add_argument("--g", type=float, default=None, help="fixed g (Hz/Pa); default g_truth")
    s.add_argument("--replicates", type=int, default=200)
    s.set_defaults(func=cmd_bootstrap, out_required=False)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.out_required and not args.out:
        print("error: --out is required", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except (BracketError, FitFailure, ConvergenceError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (io.ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
