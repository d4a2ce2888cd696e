"""Command-line harness: ``run``, ``sweep``, ``plot`` and ``validate``.

Exit codes: 0 success, 2 configuration error, 3 divergence, 4 I/O error.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np
import yaml

from . import analysis, plotting
from .adaptive import lyapunov_Q, solve_matching
from .errors import ConfigError, Diverged, DobacError, NonFiniteDerivative, SchemaMismatch
from .report import header_lines, report_entries
from .runlog import RunLog, write_report
from .scenario import PRESETS, get_key, load_scenario, resolve
from .sim import simulate

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_IO = 0, 2, 3, 4
DEFAULT_PRESET = "msd-cubic-paper"


def _window(args, scenario):
    if args.window:
        return tuple(args.window)
    if scenario.t_end >= 50:
        return (30.0, 50.0)
    return (0.6 * scenario.t_end, scenario.t_end)


def _overrides(args):
    out = list(args.set or [])
    if args.decimate is not None:
        out.append(f"sim.decimation={args.decimate}")
    return out


def _source(args):
    if args.config is None and args.preset is None:
        return None, DEFAULT_PRESET
    return args.config, args.preset


def _run_one(config, preset, overrides, out_dir, stem, window):
    """Simulate and write ``<stem>.csv`` and ``<stem>.report.txt``; return the report entries."""
    scenario = load_scenario(config, overrides, preset)
    log = simulate(scenario)
    out_dir.mkdir(parents=True, exist_ok=True)
    log.to_csv(out_dir / f"{stem}.csv")
    w = window or ((30.0, 50.0) if scenario.t_end >= 50 else (0.6 * scenario.t_end, scenario.t_end))
    entries = report_entries(log, scenario, w)
    write_report(out_dir / f"{stem}.report.txt", entries, header_lines(scenario))
    return entries


def cmd_run(args):
    config, preset = _source(args)
    scenario = load_scenario(config, _overrides(args), preset)
    out = Path(args.out)
    entries = _run_one(config, preset, _overrides(args), out, args.name or scenario.name,
                       _window(args, scenario))
    print(f"rms_e={entries['rms_e']:.6g} sup_u_drj={entries['sup_u_drj']:.6g} "
          f"eps_r={entries.get('eps_r', float('nan')):.6g} -> {out}")
    return EXIT_OK


def _sweep_job(payload):
    config, preset, overrides, out_dir, stem, window = payload
    try:
        return stem, _run_one(config, preset, overrides, Path(out_dir), stem, window), None
    except (Diverged, NonFiniteDerivative) as exc:
        return stem, None, str(exc)


def cmd_sweep(args):
    config, preset = _source(args)
    overrides = _overrides(args)
    raw = resolve(config, overrides, preset)
    get_key(raw, args.key)
    values = [v for v in args.values if v != ""]
    if not values:
        raise ConfigError("sweep needs at least one value")
    scenario = load_scenario(config, overrides, preset)
    window = _window(args, scenario)
    for v in values:  # validate every variant before starting any run
        load_scenario(config, overrides + [f"{args.key}={v}"], preset)
    out = Path(args.out)
    leaf = args.key.rsplit(".", 1)[-1]
    jobs = [(config, preset, overrides + [f"{args.key}={v}"], str(out), f"{leaf}_{v}", window)
            for v in values]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_job, jobs))
    else:
        results = [_sweep_job(j) for j in jobs]
    lines = [f"# sweep {args.key} window [{window[0]:g}, {window[1]:g}]",
             f"{'value':>12} {'status':>9} {'rms_e':>12} {'sup_u_drj':>12} {'sup_rate':>12} {'eta_plateau':>12}"]
    failed = 0
    for v, (stem, entries, err) in zip(values, results):
        if entries is None:
            failed += 1
            lines.append(f"{v:>12} {'diverged':>9}  {err}")
            continue
        lines.append(f"{v:>12} {'ok':>9} {entries['rms_e']:12.6g} {entries['sup_u_drj']:12.6g} "
                     f"{entries['sup_u_drj_rate']:12.6g} {entries['sup_eta']:12.6g}")
    out.mkdir(parents=True, exist_ok=True)
    table = "\n".join(lines) + "\n"
    (out / f"sweep_{leaf}.txt").write_text(table)
    print(table, end="")
    return EXIT_DIVERGED if failed else EXIT_OK


def cmd_plot(args):
    logs = [RunLog.from_csv(p) for p in args.logs]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for spec in args.spec:
        path = plotting.plot(logs, spec, out / f"{spec}.svg")
        print(path)
    return EXIT_OK


def cmd_validate(args):
    config, preset = _source(args)
    overrides = _overrides(args)
    sc = load_scenario(config, overrides, preset)
    p, ref = sc.plant, sc.reference
    Q = lyapunov_Q(ref.A_r, sc.gains.P)
    bounds = analysis.ParamErrorBounds.from_sets(sc.sets)
    summary = {"scenario": sc.name, "n": p.n, "steps": sc.n_steps,
               "rejection": sc.rejection.mode.value, "k_eta": sc.rejection.k_eta,
               "observer_gain": sc.observer.gain,
               "Q": np.round(Q, 12).tolist(), "lambda_min_Q": float(np.linalg.eigvalsh(Q).min()),
               "b_kx": bounds.kx, "b_kr": bounds.kr, "b_V": bounds.V, "b_W": bounds.W}
    try:
        m = solve_matching(p.A, ref.A_r, p.b, p.Lambda, ref.Lambda_r)
        summary["k_x_star"] = m.k_x_star.tolist()
        summary["k_r_star"] = float(m.k_r_star)
    except DobacError as exc:
        summary["matching"] = str(exc)
    print(yaml.safe_dump(summary, sort_keys=False), end="")
    if args.dump:
        print("---")
        print(yaml.safe_dump(resolve(config, overrides, preset), sort_keys=False), end="")
    return EXIT_OK


def _common(p):
    p.add_argument("--preset", choices=sorted(PRESETS), help="named scenario preset")
    p.add_argument("--config", help="YAML scenario file (merged on top of --preset if both given)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a dotted configuration key; repeatable")
    p.add_argument("--out", default="out", help="output directory")
    p.add_argument("--decimate", type=int, help="log every n-th step")
    p.add_argument("--window", type=float, nargs=2, metavar=("T0", "T1"),
                   help="steady-state metric window (default 30 50)")


def build_parser():
    parser = argparse.ArgumentParser(prog="dobac", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="simulate one scenario")
    _common(p)
    p.add_argument("--name", help="file stem for the outputs (default: scenario name)")
    p.set_defaults(func=cmd_run)
    p = sub.add_parser("sweep", help="one run per value of a configuration key")
    _common(p)
    p.add_argument("key", help="dotted key, e.g. rejection.k_eta")
    p.add_argument("values", nargs="*", help="values to assign to the key")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.set_defaults(func=cmd_sweep)
    p = sub.add_parser("plot", help="draw figures from run CSV files")
    p.add_argument("logs", nargs="+", help="run CSV files")
    p.add_argument("--spec", action="append", required=True, help=f"one of {sorted(plotting.PLOTS)}")
    p.add_argument("--out", default="out", help="output directory")
    p.set_defaults(func=cmd_plot)
    p = sub.add_parser("validate", help="check a configuration and print derived quantities")
    _common(p)
    p.add_argument("--dump", action="store_true", help="also print the merged configuration")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, SchemaMismatch, yaml.YAMLError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (Diverged, NonFiniteDerivative) as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DobacError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
