"""Command-line interface.

Subcommands: speeds check, activator verify, oscillator run, norms eval,
experiment gevrey-critical, experiment damping-critical, probe ck-membership,
probe empty-interior, verify-all. Exit codes: 0 all certificates pass,
1 certificate failure, 2 invalid configuration or input.

Output directories default to $RESOLAB_OUT when --out is omitted.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import harness
from .activator import ActivatorSpeed, ResonanceParams, SmoothBaseSpeed, amplitude_for_frequency
from .activator import DerivedConstants
from .errors import ConfigError, InvalidInputError
from .experiments import run_damping_critical, run_gevrey_critical
from .oscillator import OscillatorProblem, integrate_renormalized
from .reports import format_value, keyvalue_lines, read_keyvalue_lines, write_keyvalues
from .scales import SpectralCoefficients, SpectralScale, divergence_probe, log_squared_norm_partial, partial_log_norms
from .speeds import SampledSpeed, SpeedClassParams, verify_admissible

_CONFIG_KEY_DOC = """\
config file keys (flat key=value lines, # comments allowed):
  gevrey-critical : mu1 mu2 alpha H delta sigma r0 lambda0 num_frequencies
                    t_max grid_points seed divergence_threshold
  damping-critical: mu1 mu2 alpha H delta sigma lambda0 num_frequencies
                    t_max grid_points seed divergence_threshold
  ck-membership   : mu1 mu2 alpha H delta sigma speed k imax lambda0
                    grid_points seed
  empty-interior  : mu1 mu2 alpha H delta sigma base eps0 k0 n_max lambda0
                    grid_points seed
speed spec: const:V | activator:N | file:PATH   base spec: const:V | sin:m,A,omega,phi
"""


def _class_from_file(path) -> SpeedClassParams:
    entries = {}
    for no, key, value in read_keyvalue_lines(path):
        if key not in ("mu1", "mu2", "alpha", "H", "delta", "sigma"):
            raise ConfigError(f"unknown class key {key!r}", line_no=no)
        entries[key] = float(value)
    missing = [k for k in ("mu1", "mu2", "alpha", "H", "delta", "sigma") if k not in entries]
    if missing:
        raise ConfigError(f"class file missing keys: {', '.join(missing)}")
    return SpeedClassParams(
        speed_min=entries["mu1"],
        speed_max=entries["mu2"],
        alpha=entries["alpha"],
        holder_bound=entries["H"],
        damping=entries["delta"],
        damping_power=entries["sigma"],
    )


def _resolve_out(arg_out, required: bool = True):
    if arg_out:
        return Path(arg_out)
    env = os.environ.get("RESOLAB_OUT")
    if env:
        return Path(env)
    if required:
        raise ConfigError("no output directory: pass --out or set RESOLAB_OUT")
    return None


def _emit(items: dict, out_path) -> None:
    text = keyvalue_lines(items)
    print(text)
    if out_path:
        write_keyvalues(out_path, items)


def _cmd_speeds_check(args) -> int:
    params = _class_from_file(args.class_file)
    speed = SampledSpeed.from_csv(args.speed_file)
    budget = args.pair_budget if args.pair_budget else 2 * len(speed.values)
    report = verify_admissible(speed, params, budget, seed=args.seed)
    _emit(report.as_keyvalues(), args.out)
    return 0 if report.admissible else 1


def _cmd_activator_verify(args) -> int:
    params = _class_from_file(args.class_file)
    base = SmoothBaseSpeed.parse(args.base)
    base.margin_to(params)
    lam = args.frequency
    eps = args.amplitude if args.amplitude is not None else amplitude_for_frequency(params, lam)
    act = ActivatorSpeed(
        base,
        ResonanceParams(
            frequency=lam,
            amplitude=eps,
            damping=params.damping,
            damping_power=params.damping_power,
        ),
    )
    grid = np.linspace(0.0, args.tmax, args.grid_points)
    residual = act.residual_max(grid)

    sampled = act.sample(args.tmax, params)
    adm = verify_admissible(sampled, params, 2 * len(sampled.values), seed=args.seed)
    sup_dist = float(np.max(np.abs(sampled.values - base.value(sampled.times))))

    consts = DerivedConstants.from_class(params)
    margin = float(
        np.min(np.asarray(act.log_energy(grid)) - np.asarray(act.energy_floor_log(consts, grid)))
    )
    ok = residual < 1e-5 and adm.admissible and margin >= 0
    _emit(
        {
            "lambda": lam,
            "amplitude": eps,
            "base": base.describe(),
            "t_max": args.tmax,
            "residual_max": residual,
            "holder_estimate": adm.holder_estimate.value,
            "hyperbolicity_ok": adm.hyperbolicity_ok,
            "holder_ok": adm.holder_ok,
            "sup_distance": sup_dist,
            "energy_bound_margin": margin,
            "all_ok": ok,
        },
        args.out,
    )
    return 0 if ok else 1


def _cmd_oscillator_run(args) -> int:
    speed = SampledSpeed.from_csv(args.speed_file)
    if speed.t_end < args.tmax:
        raise ConfigError(
            f"speed file covers [0, {format_value(speed.t_end)}] but --tmax is {args.tmax}"
        )
    problem = OscillatorProblem(
        frequency=args.frequency,
        speed=speed,
        damping=args.delta,
        damping_power=args.sigma,
    )
    grid = np.linspace(0.0, args.tmax, args.grid_points)
    trace, _, _ = integrate_renormalized(problem, args.tmax, rel_tol=args.tol, grid=grid)
    if args.out:
        trace.to_csv(args.out)
    else:
        print("t,log_energy")
        for t, le in zip(trace.times, trace.log_energy):
            print(f"{format_value(float(t))},{format_value(float(le))}")
    return 0


def _cmd_norms_eval(args) -> int:
    coeffs = SpectralCoefficients.from_csv(args.coeff_file)
    scale = SpectralScale.parse(args.scale)
    n = args.truncation if args.truncation is not None else len(coeffs.eigenvalues)
    value = log_squared_norm_partial(coeffs, scale, n)
    trend = divergence_probe(partial_log_norms(coeffs, scale)[:n]) if n >= 8 else None
    _emit(
        {
            "scale": scale.describe(),
            "n_terms": n,
            "log_partial_sum": value,
            "trend": trend.value if trend is not None else "insufficient-terms",
        },
        args.out,
    )
    return 0


def _cmd_experiment(args) -> int:
    out = _resolve_out(args.out)
    if args.which == "gevrey-critical":
        report = run_gevrey_critical(harness.load_gevrey_config(args.config))
    else:
        report = run_damping_critical(harness.load_damping_config(args.config))
    report.write(out)
    return 0 if report.passed else 1


def _cmd_probe(args) -> int:
    out = _resolve_out(args.out)
    if args.which == "ck-membership":
        return harness.run_ck_probe(harness.load_ck_config(args.config), out)
    return harness.run_empty_interior_probe(harness.load_empty_interior_config(args.config), out)


def _cmd_verify_all(args) -> int:
    out = _resolve_out(args.out, required=False) or Path("resolab-out")
    suites = args.suites.split(",") if args.suites else None
    return harness.verify_all(out, suites)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resolab",
        description="Resonant propagation speeds, spectral energy growth, and derivative-loss certificates.",
        epilog=_CONFIG_KEY_DOC,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    speeds = sub.add_parser("speeds", help="sampled-speed utilities").add_subparsers(
        dest="sub", required=True
    )
    check = speeds.add_parser("check", help="admissibility report for a sampled speed")
    check.add_argument("--speed-file", required=True, help="CSV with header t,c")
    check.add_argument("--class-file", required=True, help="key=value file: mu1 mu2 alpha H delta sigma")
    check.add_argument("--pair-budget", type=int, default=0, help="random Hölder pairs (default 2x samples)")
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--out", help="also write the report to this file")
    check.set_defaults(fn=_cmd_speeds_check)

    activator = sub.add_parser("activator", help="resonant speed construction").add_subparsers(
        dest="sub", required=True
    )
    verify = activator.add_parser("verify", help="certificate for one activator frequency")
    verify.add_argument("--lambda", dest="frequency", type=float, required=True)
    verify.add_argument("--base", required=True, help="const:V or sin:m,A,omega,phi")
    verify.add_argument("--class-file", required=True)
    verify.add_argument("--tmax", type=float, required=True)
    verify.add_argument("--amplitude", type=float, default=None, help="override the canonical ripple")
    verify.add_argument("--grid-points", type=int, default=257)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--out")
    verify.set_defaults(fn=_cmd_activator_verify)

    oscillator = sub.add_parser("oscillator", help="direct oscillator integration").add_subparsers(
        dest="sub", required=True
    )
    run = oscillator.add_parser("run", help="integrate one frequency over a tabulated speed")
    run.add_argument("--lambda", dest="frequency", type=float, required=True)
    run.add_argument("--speed-file", required=True, help="CSV with header t,c")
    run.add_argument("--tmax", type=float, required=True)
    run.add_argument("--tol", type=float, required=True, help="relative tolerance in [1e-12, 1e-3]")
    run.add_argument("--delta", type=float, default=0.0)
    run.add_argument("--sigma", type=float, default=0.0)
    run.add_argument("--grid-points", type=int, default=513)
    run.add_argument("--out", help="trace CSV path (stdout when omitted)")
    run.set_defaults(fn=_cmd_oscillator_run)

    norms = sub.add_parser("norms", help="spectral scale norms").add_subparsers(dest="sub", required=True)
    ev = norms.add_parser("eval", help="log partial norm of a coefficient file")
    ev.add_argument("--coeff-file", required=True, help="CSV with header lambda,a")
    ev.add_argument(
        "--scale",
        required=True,
        help="sobolev:beta | gevrey:s,r,beta | hyper:S,R,beta | gevrey-log:s,beta | hyper-log:S,beta",
    )
    ev.add_argument("--truncation", type=int, default=None)
    ev.add_argument("--out")
    ev.set_defaults(fn=_cmd_norms_eval)

    experiment = sub.add_parser("experiment", help="derivative-loss experiment suites").add_subparsers(
        dest="which", required=True
    )
    for which in ("gevrey-critical", "damping-critical"):
        p = experiment.add_parser(which, epilog=_CONFIG_KEY_DOC, formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--config", required=True)
        p.add_argument("--out", help="output directory (default $RESOLAB_OUT)")
        p.set_defaults(fn=_cmd_experiment)

    probe = sub.add_parser("probe", help="Baire-set probes").add_subparsers(dest="which", required=True)
    for which in ("ck-membership", "empty-interior"):
        p = probe.add_parser(which, epilog=_CONFIG_KEY_DOC, formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--config", required=True)
        p.add_argument("--out", help="output directory (default $RESOLAB_OUT)")
        p.set_defaults(fn=_cmd_probe)

    va = sub.add_parser("verify-all", help="run the whole acceptance matrix")
    va.add_argument("--out", help="output directory (default $RESOLAB_OUT or ./resolab-out)")
    va.add_argument("--suites", help=f"comma list from: {', '.join(harness.SUITES)}, reference-runs")
    va.set_defaults(fn=_cmd_verify_all)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except InvalidInputError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
