"""Command-line front end.

Subcommands: ``simulate`` (record generation), ``estimate`` (run estimators
on a record file), ``sweep`` (tilt-angle sweep against theory), ``snr``
(Monte Carlo misalignment robustness), and ``analytic`` (closed-form
resolution-limit calculator).  Outputs are CSV or JSON so the results feed
external plotting directly.

Exit codes: 0 success, 1 model or estimator error, 2 input format error.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import estimators, io, simulator
from .constants import FS, wavelength_to_angular_frequency
from .errors import FormatError, WeakDelayError
from .estimators import Method
from .polarization import QwpModel, port_projections
from .spectra import pooled_variance, record_moments


def _add_simulate(sub):
    p = sub.add_parser("simulate", help="generate a synthetic record file")
    p.add_argument("--config", required=True, help="run-configuration JSON")
    p.add_argument("--out", required=True, help="output record CSV")
    p.add_argument("--seed", type=int, default=None,
                   help="override the configuration seed")
    p.set_defaults(func=cmd_simulate)


def cmd_simulate(args) -> int:
    config, resolved = io.load_config(args.config)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
        resolved["seed"] = args.seed
    record = simulator.simulate(config)
    io.write_record(args.out, record)
    sidecar = Path(args.out).with_suffix(".config.json")
    sidecar.write_text(json.dumps(resolved, indent=2) + "\n")
    print(json.dumps({"record": str(args.out), "sidecar": str(sidecar),
                      "tau_true_fs": record.metadata["tau_true_s"] / FS,
                      "total_events": record.total_events}))
    return 0


def _add_estimate(sub):
    p = sub.add_parser("estimate", help="estimate the delay from a record file")
    p.add_argument("--records", required=True, help="record CSV path")
    p.add_argument("--method", default="all",
                   choices=[m.value for m in Method] + ["all"])
    p.add_argument("--phi", type=float, required=True,
                   help="assumed postselection offset [rad]")
    p.add_argument("--qwp", default="ideal", choices=["ideal", "dispersive", "absent"])
    p.add_argument("--tau0-fs", type=float, default=None,
                   help="dispersive analyzer retardance time [fs] "
                        "(default pi/4 over the centre frequency)")
    p.add_argument("--center-nm", type=float, default=780.0,
                   help="centre wavelength used for analyzer defaults")
    p.set_defaults(func=cmd_estimate)


def _analyzer(args, omega):
    if args.qwp == "dispersive":
        omega0 = wavelength_to_angular_frequency(args.center_nm)
        tau0 = (np.pi / 4) / omega0 if args.tau0_fs is None else args.tau0_fs * FS
        qwp = QwpModel(variant="dispersive", tau0=tau0)
    else:
        qwp = QwpModel(variant=args.qwp)
    wv, _, _ = port_projections(args.phi, omega, qwp)
    return wv


def _estimate_one(method: str, record, args):
    wv = _analyzer(args, record.omega)
    if method == Method.EXACT.value:
        return estimators.solve_exact(record, wv)
    if method == Method.QUARTIC.value:
        return estimators.quartic(record, wv)
    if method == Method.FIRST_ORDER.value:
        return estimators.first_order(record, args.phi)
    if method == Method.JWM_SIMPLIFIED.value:
        return estimators.jwm_simplified(record)
    if method == Method.STRUBI_REFERENCE.value:
        return estimators.strubi_reference(record)
    if method == Method.WVA_FIRST_ORDER.value:
        return estimators.wva_first_order(record, args.phi)
    if method == Method.WVA_MEAN_SHIFT.value:
        m1, m2 = record_moments(record)
        return estimators.wva_mean_shift(
            delta_omega=m1.m1_bar - m2.m1_bar,
            im_aw2=1.0 / np.tan(args.phi / 2),
            variance=pooled_variance(record))
    raise FormatError(f"unknown method {method!r}")


def cmd_estimate(args) -> int:
    record = io.read_record(args.records)
    methods = [m.value for m in Method] if args.method == "all" else [args.method]
    results = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for method in methods:
            results.append(io.result_to_dict(_estimate_one(method, record, args)))
    print(json.dumps(results if args.method == "all" else results[0], indent=2))
    return 0


def _add_sweep(sub):
    p = sub.add_parser("sweep", help="tilt-angle sweep of estimators vs theory")
    p.add_argument("--config", required=True, help="run-configuration JSON "
                   "(must include a stack or use defaults)")
    p.add_argument("--theta-min", type=float, required=True)
    p.add_argument("--theta-max", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--mode", default="auto", choices=["auto", "jwm", "wva"])
    p.add_argument("--out", required=True, help="output CSV")
    p.set_defaults(func=cmd_sweep)


def cmd_sweep(args) -> int:
    config, _ = io.load_config(args.config)
    if args.steps < 1:
        raise FormatError("steps must be >= 1")
    from .waveplate import default_quartz_stack
    stack = config.stack or default_quartz_stack(config.source.center_nm * 1e-9)
    thetas = np.linspace(args.theta_min, args.theta_max, args.steps)
    base = config if config.tau_true is not None else replace(
        config, theta=None, stack=None, tau_true=0.0)
    rows = simulator.sweep_theta(thetas, stack, base, mode=args.mode)
    jwm_mode = Method.JWM_SIMPLIFIED.value in rows[0].estimates
    header = "theta_rad,tau_theory_s,tau_exact_s,tau_first_order_s"
    if jwm_mode:
        header += ",tau_jwm_s"
    lines = [header]
    for row in rows:
        fields = [f"{row.theta:.17g}", f"{row.tau_theory:.17g}",
                  f"{row.estimates['exact']:.17g}",
                  f"{row.estimates['first_order']:.17g}"]
        if jwm_mode:
            fields.append(f"{row.estimates['jwm_simplified']:.17g}")
        lines.append(",".join(fields))
    Path(args.out).write_text("\n".join(lines) + "\n")
    print(json.dumps({"rows": len(rows), "out": str(args.out)}))
    return 0


def _add_snr(sub):
    p = sub.add_parser("snr", help="Monte Carlo SNR under phi misalignment")
    p.add_argument("--config", required=True)
    p.add_argument("--alphas", required=True,
                   help="comma-separated dimensionless delays (omega0 tau)")
    p.add_argument("--phi-actual", type=float, required=True)
    p.add_argument("--phi-assumed", required=True,
                   help="comma-separated assumed phi values [rad]")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--out", required=True, help="output CSV")
    p.set_defaults(func=cmd_snr)


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise FormatError(f"could not parse {what} list {text!r}") from None


def cmd_snr(args) -> int:
    config, _ = io.load_config(args.config)
    alphas = _parse_floats(args.alphas, "alpha")
    phis = _parse_floats(args.phi_assumed, "phi")
    base = config if config.tau_true is not None else replace(
        config, theta=None, stack=None, tau_true=0.0)
    points = simulator.snr_sweep(alphas, args.phi_actual, phis, args.trials, base)
    lines = ["alpha,phi_assumed,snr_db,trials"]
    for pt in points:
        lines.append(f"{pt.alpha:.17g},{pt.phi_assumed:.17g},"
                     f"{pt.snr_db:.17g},{pt.trials}")
    Path(args.out).write_text("\n".join(lines) + "\n")
    print(json.dumps({"points": len(points), "out": str(args.out)}))
    return 0


def _add_analytic(sub):
    p = sub.add_parser("analytic", help="closed-form resolution-limit formulas")
    p.add_argument("--alpha-min", action="store_true",
                   help="minimum detectable alpha for a misalignment epsilon")
    p.add_argument("--uncertainty", action="store_true",
                   help="uncertainty of alpha at a given postselection beta")
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--lambda0-nm", type=float, default=780.0)
    p.add_argument("--delta-lambda-nm", type=float, default=17.6)
    p.add_argument("--resolution-nm", type=float, default=0.1)
    p.set_defaults(func=cmd_analytic)


def cmd_analytic(args) -> int:
    out = {"lambda0_nm": args.lambda0_nm, "delta_lambda_nm": args.delta_lambda_nm,
           "resolution_nm": args.resolution_nm,
           "resolution_factor": simulator.resolution_factor(
               args.lambda0_nm, args.delta_lambda_nm, args.resolution_nm)}
    if args.alpha_min == args.uncertainty:
        raise FormatError("choose exactly one of --alpha-min / --uncertainty")
    if args.alpha_min:
        eps = 1.0 if args.epsilon is None else args.epsilon
        out["epsilon"] = eps
        out["alpha_min"] = simulator.alpha_min(
            eps, args.lambda0_nm, args.delta_lambda_nm, args.resolution_nm)
        out["alpha_min_per_epsilon"] = simulator.alpha_min(
            1.0, args.lambda0_nm, args.delta_lambda_nm, args.resolution_nm)
    else:
        if args.alpha is None or args.beta is None:
            raise FormatError("--uncertainty requires --alpha and --beta")
        out["alpha"] = args.alpha
        out["beta"] = args.beta
        out["delta_alpha"] = simulator.wva_uncertainty(
            args.alpha, args.beta, args.lambda0_nm, args.delta_lambda_nm,
            args.resolution_nm)
    print(json.dumps(out, indent=2))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weakdelay",
        description="Simulate and estimate postselected weak-measurement "
                    "time delays.")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_simulate(sub)
    _add_estimate(sub)
    _add_sweep(sub)
    _add_snr(sub)
    _add_analytic(sub)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FormatError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 2
    except WeakDelayError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": "IOError", "message": str(exc)}),
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
