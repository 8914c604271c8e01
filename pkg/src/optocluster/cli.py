"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 3 physics error (instability,
unphysical state, strict RWA violation), 4 sweep finished with failed points.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings

import numpy as np

from . import __version__
from .errors import (
    BogoliubovError,
    ConfigError,
    DomainError,
    NumericalError,
    PhysicsError,
    ShapeError,
    SynthesisError,
)
from .experiments import PRESET_NAMES, load_config, preset, run_point, run_sweep, to_toml
from .experiments.presets import DESCRIPTIONS
from .model import check_rwa, synthesize_drives, tone_detunings

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PHYSICS = 3
EXIT_PARTIAL = 4


def _scenario(path):
    scenario, _ = load_config(path)
    return scenario


def cmd_simulate(args):
    cfg = _scenario(args.config)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        row = run_point(cfg, strict_rwa=args.strict_rwa)
    if args.json:
        payload = row.to_dict()
        payload["warnings"] = [str(w.message) for w in caught]
        text = json.dumps(payload, indent=2)
        if args.json == "-":
            print(text)
        else:
            with open(args.json, "w") as fh:
                fh.write(text + "\n")
    if args.json != "-":
        print(f"modes               {row.n_modes}")
        print(f"fidelity            {row.fidelity:.10g}")
        for j, (v, db) in enumerate(zip(row.nullifier_var, row.nullifier_db), start=1):
            print(f"nullifier {j:<3d}       {v:.6g}  ({db:+.3f} dB)")
        print(f"xi_star             {row.xi_star:.6g} rad/s")
        print(f"min cooperativity   {row.coop_min:.6g}")
        print(f"stability margin    {row.stability:.6g} rad/s")
        print(f"rwa ratio           {row.rwa_ratio:.4g}  (full check {'pass' if row.rwa_pass else 'FAIL'})")
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
    return EXIT_OK


def cmd_sweep(args):
    _, spec = load_config(args.config)
    if spec is None:
        raise ConfigError(f"{args.config} has no [sweep] table")
    result = run_sweep(spec, args.out, jobs=args.jobs, strict_rwa=args.strict_rwa, gnuplot=args.gnuplot)
    if args.out is None:
        from .experiments.sweep import rows_to_csv

        sys.stdout.write(rows_to_csv(result.rows))
    else:
        print(f"wrote {len(result.rows)} rows to {args.out}", file=sys.stderr)
    if result.failures:
        print(f"{result.failures} of {len(result.rows)} points failed", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def cmd_drives(args):
    cfg = _scenario(args.config)
    params, a = cfg.resolve()
    drives = synthesize_drives(params, a)
    detuning = tone_detunings(params) - params.delta[:, None]
    absolute = params.omega_tilde is not None
    head = f"{'k':>3} {'m':>4} {'side':>5} {'detuning [rad/s]':>20} {'|eps|':>14} {'arg eps':>10}"
    if absolute:
        head += f" {'lambda [rad/s]':>22}"
    print(head)
    n = params.n
    for k in range(n):
        for m in range(2 * n):
            eps = drives.epsilon[k, m]
            if eps == 0 and not args.all:
                continue
            line = (
                f"{k + 1:>3} {m + 1:>4} {'red' if m < n else 'blue':>5} {detuning[k, m]:>20.10g} "
                f"{abs(eps):>14.6g} {np.angle(eps):>10.5f}"
            )
            if absolute:
                line += f" {drives.lam[k, m]:>22.15g}"
            print(line)
    return EXIT_OK


def cmd_check_rwa(args):
    cfg = _scenario(args.config)
    params, a = cfg.resolve()
    safety = args.safety if args.safety is not None else cfg.rwa_safety
    rep = check_rwa(params, a, safety)
    print(f"simple ratio g~ e^r / (2 Omega_bar) = {rep.simple_ratio:.6g}   (limit {1 / safety:.4g})")
    print(f"sideband ratio kappa / Omega_bar    = {rep.sideband_ratio:.6g}")
    for family, worst in rep.family_max.items():
        status = "pass" if rep.passed_by_family[family] else "FAIL"
        print(f"{family:<16} max ratio {worst:.6g}  {status}")
    for family in ("direct", "beat_difference", "beat_sum"):
        margins = getattr(rep, family) if args.all else rep.worst(family, args.top)
        print(f"\n[{family}]")
        print(f"{'k':>3} {'m':>3} {'m2':>3} {'j':>3} {'lhs [rad/s]':>14} {'rhs [rad/s]':>14} {'ratio':>12}")
        for mg in margins:
            j = "" if mg.j is None else mg.j + 1
            print(
                f"{mg.k + 1:>3} {mg.m + 1:>3} {mg.m_prime + 1:>3} {j:>3} "
                f"{mg.lhs:>14.6g} {mg.rhs:>14.6g} {mg.ratio:>12.4g}"
            )
    print(f"\noverall: {'pass' if rep.passed else 'FAIL'}")
    return EXIT_OK


def cmd_preset(args):
    spec = preset(args.name)
    text = to_toml(spec.base, spec)
    if args.emit_config:
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    print(f"{args.name}: {DESCRIPTIONS[args.name]}")
    print(f"axis   {spec.axis} ({spec.axis_key}), {len(spec.grid)} points "
          f"from {spec.grid[0]:g} to {spec.grid[-1]:g}")
    print(f"series {', '.join(s.label for s in spec.effective_series())}")
    for key, value in spec.base.to_dict().items():
        print(f"  {key} = {value}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="optocluster",
        description="Steady-state cluster-state preparation in multimode optomechanics.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="evaluate one configuration")
    p.add_argument("config")
    p.add_argument("--json", nargs="?", const="-", metavar="PATH",
                   help="machine-readable output (stdout when PATH is omitted)")
    p.add_argument("--strict-rwa", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run the [sweep] of a configuration and write CSV")
    p.add_argument("config")
    p.add_argument("--out", metavar="PATH")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--strict-rwa", action="store_true")
    p.add_argument("--gnuplot", metavar="PATH", help="also write a gnuplot script")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("drives", help="tone table for the configured cluster state")
    p.add_argument("config")
    p.add_argument("--all", action="store_true", help="include zero-amplitude tones")
    p.set_defaults(func=cmd_drives)

    p = sub.add_parser("check-rwa", help="rotating-wave margin table")
    p.add_argument("config")
    p.add_argument("--safety", type=float)
    p.add_argument("--top", type=int, default=5, help="rows per family (default 5)")
    p.add_argument("--all", action="store_true", help="print every condition")
    p.set_defaults(func=cmd_check_rwa)

    p = sub.add_parser("preset", help="describe or emit a figure preset")
    p.add_argument("name", choices=PRESET_NAMES)
    p.add_argument("--emit-config", action="store_true")
    p.add_argument("--out", metavar="PATH")
    p.set_defaults(func=cmd_preset)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ShapeError, DomainError, SynthesisError, BogoliubovError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PhysicsError, NumericalError) as exc:
        print(f"physics error: {exc}", file=sys.stderr)
        return EXIT_PHYSICS


if __name__ == "__main__":
    sys.exit(main())
