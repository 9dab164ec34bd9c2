"""Command-line surface: simulation, sweeps, spectra, conversions, fits.

Every subcommand emits plot-ready CSV and/or machine-readable JSON into
--output-dir and is deterministic given its flags (and seed).  Exit
codes: 0 success, 2 flag error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import analytic, fourier, integrate, meson
from .core import QubitModel
from .fit import (DatasetFormatError, RankDeficientDesign, estimate_r,
                  fit_fourier_modes, fit_result_to_json, load_dataset)

EXIT_OK = 0
EXIT_FLAG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    print(path)


def _csv(header: list[str], rows) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(float(x)) if not isinstance(x, str) else x
                              for x in row))
    return "\n".join(lines) + "\n"


def _parse_b0(spec: str, model: QubitModel) -> np.ndarray:
    named = {
        "exg": model.e_cross_gamma,
        "gamma": model.gamma,
        "e": model.e,
        "mixed": np.zeros(3),
    }
    if spec in named:
        return named[spec]
    try:
        vec = np.array([float(x) for x in spec.split(",")], dtype=float)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"--b0 must be one of {sorted(named)} or 'x,y,z', got '{spec}'")
    if vec.shape != (3,):
        raise argparse.ArgumentTypeError("--b0 vector needs three components")
    return vec


def _parse_tmax(spec: str, r: float) -> float:
    """Absolute tau, or period-relative like '3P' for oscillating systems."""
    if spec.lower().endswith("p"):
        if not (0.0 < r < 1.0):
            raise argparse.ArgumentTypeError(
                "period-relative --t-max needs r < 1")
        mult = float(spec[:-1] or 1.0)
        return mult * analytic.cuq_clock(r).P_hat
    return float(spec)


def _parse_grid(spec: str) -> np.ndarray:
    """'lo:hi:n' linear grid or comma-separated values."""
    if ":" in spec:
        lo, hi, n = spec.split(":")
        return np.linspace(float(lo), float(hi), int(n))
    return np.array([float(x) for x in spec.split(",")])


def cmd_simulate(args) -> int:
    model = QubitModel.from_angle(args.r, args.theta_eg, args.e_mag,
                                  degrees=True)
    b0 = _parse_b0(args.b0, model)
    tau_end = _parse_tmax(args.t_max, args.r)
    traj = integrate.evolve(model, b0, tau_end,
                            rel_tol=args.rel_tol, abs_tol=args.abs_tol)
    exg = model.e_cross_gamma
    rows = []
    for t, b in zip(traj.taus, traj.bs):
        rows.append([t, b[0], b[1], b[2], np.linalg.norm(b),
                     np.dot(b, model.gamma), np.dot(b, exg)])
    text = _csv(["tau", "b1", "b2", "b3", "b_mag", "b_dot_gamma", "b_dot_exg"],
                rows)
    _write(Path(args.output_dir) / "trajectory.csv", text)
    return EXIT_OK


def cmd_sweep_bmax(args) -> int:
    rows = []
    for r in _parse_grid(args.r_grid):
        model = QubitModel.from_angle(r, 90.0, 1.0, degrees=True)
        if 0.0 < r < 1.0:
            tau_end = 5.0 * analytic.cuq_clock(r).P_hat
        else:
            tau_end = 50.0 * max(r, 1.0)
        for b0_mag in _parse_grid(args.b0_grid):
            traj = integrate.evolve(model, b0_mag * model.gamma, tau_end,
                                    rel_tol=1e-10, abs_tol=1e-13)
            rows.append([r, b0_mag, traj.magnitudes().max()])
    text = _csv(["r", "b0_mag", "b_max"], rows)
    _write(Path(args.output_dir) / "bmax.csv", text)
    return EXIT_OK


def cmd_fourier(args) -> int:
    r, N = args.r, args.n_max
    if not (0.0 < r < 1.0):
        print(f"error: r must be in (0, 1), got {r}", file=sys.stderr)
        return EXIT_FLAG
    clock = analytic.cuq_clock(r)
    quad_odd = fourier.quadrature_spectrum(
        lambda t: analytic.cuq_projections(t, r)[0], clock.P_hat, N,
        fourier.SeriesKind.ODD)
    quad_even = fourier.quadrature_spectrum(
        lambda t: analytic.cuq_projections(t, r)[1], clock.P_hat, N,
        fourier.SeriesKind.EVEN)
    closed = [fourier.closed_form_cn(n, r) for n in range(1, N + 1)]
    d0_closed = fourier.closed_form_d0(r)
    report = {
        "r": r,
        "P_hat": clock.P_hat,
        "omega_hat": clock.omega_hat,
        "d0": {"closed_form": d0_closed, "quadrature": quad_even.d0,
               "deviation": abs(d0_closed - quad_even.d0)},
        "coefficients": [
            {"n": n, "closed_form": cf,
             "quadrature_odd": float(quad_odd.coeffs[n - 1]),
             "quadrature_even": float(quad_even.coeffs[n - 1])}
            for n, cf in zip(range(1, N + 1), closed)
        ],
    }
    devs = [abs(c["closed_form"] - c["quadrature_odd"]) for c in
            report["coefficients"]]
    devs += [abs(c["closed_form"] - c["quadrature_even"]) for c in
             report["coefficients"]]
    report["max_deviation"] = max(devs + [report["d0"]["deviation"]])
    if args.format == "json":
        _write(Path(args.output_dir) / "spectrum.json",
               json.dumps(report, indent=2))
    else:
        rows = [[c["n"], c["closed_form"], c["quadrature_odd"],
                 c["quadrature_even"]] for c in report["coefficients"]]
        rows.insert(0, [0, d0_closed, float("nan"), quad_even.d0])
        _write(Path(args.output_dir) / "spectrum.csv",
               _csv(["n", "closed_form", "quadrature_odd", "quadrature_even"],
                    [[str(int(r0[0]))] + r0[1:] for r0 in rows]))
    return EXIT_OK


def cmd_convert(args) -> int:
    if args.from_bloch:
        r, theta, e_mag = args.from_bloch
        params = meson.BlochParameters(r=r, theta_eg_deg=theta, E_mag=e_mag)
        obs = meson.observables_from_bloch(params)
        branch_note = ""
    else:
        de, dg, qop = args.from_observables
        obs = meson.MesonObservables(delta_E=de, delta_Gamma=dg, q_over_p=qop)
        inv = meson.bloch_from_observables(obs)
        params = inv.params
        branch_note = (f"mirror branch: theta = {inv.mirror.theta_eg_deg:.6g} deg"
                       + (" (CUQ branch forced)" if inv.forced_cuq_branch else ""))
    out = {
        "observables": {"delta_E": obs.delta_E, "delta_Gamma": obs.delta_Gamma,
                        "q_over_p": obs.q_over_p},
        "bloch": {"r": params.r, "theta_eg_deg": params.theta_eg_deg,
                  "E_mag": params.E_mag},
        "damping": meson.classify_damping(params.r).value,
    }
    if branch_note:
        out["branch"] = branch_note
    print(json.dumps(out, indent=2))
    return EXIT_OK


def cmd_fit(args) -> int:
    data = load_dataset(args.data, omega=args.omega)
    fit = fit_fourier_modes(data, args.n_harmonics)
    extraction = estimate_r(fit, amplitude_correction=args.amplitude)
    _write(Path(args.output_dir) / "fit.json",
           fit_result_to_json(fit, extraction))
    ns = np.arange(args.n_harmonics + 1)
    pred = np.cos(np.outer(data.t, ns) * data.omega) @ fit.coefficients
    rows = [[t, d, p, d - p, s]
            for t, d, p, s in zip(data.t, data.delta, pred, data.sigma)]
    _write(Path(args.output_dir) / "residuals.csv",
           _csv(["t_ps", "asymmetry", "fit", "residual", "sigma"], rows))
    # human-readable summary
    print(f"{'n':>3} {'d_n':>12} {'err':>12} {'p-value':>10}")
    for n, v, e, p in zip(ns, fit.coefficients, fit.errors, fit.p_values):
        print(f"{n:>3} {v:>12.6g} {e:>12.3g} {p:>10.3g}")
    print(f"chi2/dof = {fit.chi2:.4g}/{fit.dof}")
    if extraction.has_estimate:
        print(f"weighted r = {extraction.weighted_r:.4g} "
              f"+- {extraction.weighted_r_err:.4g}")
    else:
        print(f"no r estimate: {extraction.diagnostics}")
    return EXIT_OK


def cmd_catalogue(args) -> int:
    if args.format == "json":
        _write(Path(args.output_dir) / "catalogue.json",
               meson.catalogue_to_json())
    else:
        _write(Path(args.output_dir) / "catalogue.csv",
               meson.catalogue_to_csv())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cuq",
        description="Dynamics, spectra and fits for critical unstable qubits")
    parser.add_argument("--output-dir", default=".", help="output directory")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for stochastic subcommands")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate the master evolution equation")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--theta-eg", type=float, default=90.0,
                   help="angle between e and gamma in degrees")
    p.add_argument("--e-mag", type=float, default=1.0)
    p.add_argument("--b0", default="exg",
                   help="exg | gamma | e | mixed | 'x,y,z'")
    p.add_argument("--t-max", default="3P",
                   help="tau range; '3P' means three periods")
    p.add_argument("--rel-tol", type=float, default=1e-9)
    p.add_argument("--abs-tol", type=float, default=1e-12)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep-bmax",
                       help="max |b| over initial conditions parallel to gamma")
    p.add_argument("--r-grid", default="0.1:0.95:18",
                   help="'lo:hi:n' or comma list")
    p.add_argument("--b0-grid", default="0,0.25,0.5,0.75,1")
    p.set_defaults(func=cmd_sweep_bmax)

    p = sub.add_parser("fourier",
                       help="closed-form vs quadrature oscillation spectrum")
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--n-max", type=int, default=10)
    p.set_defaults(func=cmd_fourier)

    p = sub.add_parser("convert",
                       help="translate between parameterizations")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--from-bloch", nargs=3, type=float,
                       metavar=("R", "THETA_DEG", "E_MAG"))
    group.add_argument("--from-observables", nargs=3, type=float,
                       metavar=("DELTA_E", "DELTA_GAMMA", "Q_OVER_P"))
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("fit", help="Fourier-mode regression of asymmetry data")
    p.add_argument("--data", required=True, help="CSV file: t_ps,asymmetry,sigma")
    p.add_argument("--omega", type=float, required=True,
                   help="angular frequency in 1/ps (the mass splitting)")
    p.add_argument("--n-harmonics", type=int, default=2)
    p.add_argument("--amplitude", type=float, default=None,
                   help="projection amplitude R for the effective-r correction")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("catalogue", help="meson systems in both parameterizations")
    p.set_defaults(func=cmd_catalogue)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except argparse.ArgumentTypeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FLAG
    try:
        return args.func(args)
    except (DatasetFormatError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (integrate.StepSizeUnderflow, RankDeficientDesign,
            meson.UnphysicalObservables, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FLAG


if __name__ == "__main__":
    sys.exit(main())
