"""Command-line front end.

Exit codes: 0 success, 2 config error, 3 no steady state, 4 unstable
operating point (``point`` only).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import ConfigError, NoSteadyStateError
from .params import apply_overrides, config_to_objects, load_config
from .spectrum import SpectrumMethod
from .steady_state import solve_steady_states
from .sweeps import (
    FIGURES,
    SweepAxis,
    SweepSpec,
    params_hash,
    run_figure,
    run_point,
    run_sweep,
    to_csv,
    write_dataset,
)

EXIT_CONFIG = 2
EXIT_NO_STEADY_STATE = 3
EXIT_UNSTABLE = 4


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--params", help="JSON parameter file (default: bundled reference set)")
    p.add_argument("--out", help="output directory; CSV goes to stdout when omitted")
    p.add_argument(
        "--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
        help="override a config key (repeatable)",
    )
    p.add_argument("--workers", type=int, default=1, help="threads for sweep points")


def _spectral(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--method", choices=[m.value for m in SpectrumMethod], default=SpectrumMethod.ANALYTIC_CORRECTED.value,
        help="spectrum formula",
    )
    p.add_argument("--oracle", action="store_true", help="add a matrix-oracle column for validation")
    p.add_argument("--omega-min", type=float, default=0.5, help="lowest omega/omega_m")
    p.add_argument("--omega-max", type=float, default=1.5, help="highest omega/omega_m")
    p.add_argument("--omega-points", type=int, default=4001)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quadopto",
        description="Optomechanics with linear and quadratic coupling: steady states, stability, spectra, NMS peaks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("steady-state", help="print all steady-state branches as JSON")
    _common(p)

    p = sub.add_parser("point", help="full JSON report for one operating point")
    _common(p)

    p = sub.add_parser("stability-map", help="stability over a (power, g_q/g_l) grid")
    _common(p)
    p.add_argument("--power-min", type=float, default=0.1)
    p.add_argument("--power-max", type=float, default=12.0)
    p.add_argument("--power-points", type=int, default=60)
    p.add_argument("--gq-min", type=float, default=-2e-5)
    p.add_argument("--gq-max", type=float, default=2e-5)
    p.add_argument("--gq-points", type=int, default=41)

    p = sub.add_parser("spectrum", help="S_xx on a frequency grid at one operating point")
    _common(p)
    _spectral(p)

    p = sub.add_parser("peaks", help="NMS peak positions and widths versus g_q/g_l")
    _common(p)
    p.add_argument("--gq-min", type=float, default=-12e-6)
    p.add_argument("--gq-max", type=float, default=20e-6)
    p.add_argument("--gq-points", type=int, default=33)
    p.add_argument("--power-min", type=float)
    p.add_argument("--power-max", type=float)
    p.add_argument("--power-points", type=int, help="sweep power too (2D) when >= 2")

    for fig in FIGURES:
        p = sub.add_parser(fig, help=f"dataset for {fig}")
        _common(p)
        if fig.startswith("fig2"):
            _spectral(p)
    return parser


def _emit(args, name, columns, rows, config, extra=None) -> None:
    if args.out:
        meta = {
            "command": args.command,
            "config": config,
            "params_sha256": params_hash(config),
            "method": getattr(args, "method", None),
            "oracle": getattr(args, "oracle", False),
        }
        meta.update(extra or {})
        path = write_dataset(args.out, name, columns, rows, meta)
        print(path)
    else:
        sys.stdout.write(to_csv(columns, rows))


def _run(args) -> int:
    config = apply_overrides(load_config(args.params), args.overrides)
    cmd = args.command

    if cmd == "steady-state":
        params, drive = config_to_objects(config)
        try:
            branches = solve_steady_states(params, drive)
        except NoSteadyStateError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_NO_STEADY_STATE
        text = json.dumps([b.to_dict() for b in branches], indent=2)
        _write_json(args, "steady_state", text)
        return 0

    if cmd == "point":
        report = run_point(config)
        _write_json(args, "point", json.dumps(report, indent=2, sort_keys=True))
        if not report["branches"]:
            return EXIT_NO_STEADY_STATE
        if not report["stable"]:
            return EXIT_UNSTABLE
        return 0

    if cmd == "stability-map":
        spec = SweepSpec(
            axis1=SweepAxis("power_mw", args.power_min, args.power_max, args.power_points),
            axis2=SweepAxis("gq_ratio", args.gq_min, args.gq_max, args.gq_points),
            outputs=("stability",),
        )
        cols, rows = run_sweep(spec, config, workers=args.workers)
        _emit(args, "stability_map", cols, rows, config)
        return 0

    if cmd == "spectrum":
        spec = SweepSpec(
            axis1=SweepAxis("omega_over_omega_m", args.omega_min, args.omega_max, args.omega_points),
            outputs=("spectrum",),
        )
        cols, rows = run_sweep(spec, config, method=args.method, oracle=args.oracle, workers=args.workers)
        _emit(args, "spectrum", cols, rows, config)
        return 0

    if cmd == "peaks":
        gq = SweepAxis("gq_ratio", args.gq_min, args.gq_max, args.gq_points)
        if args.power_points and args.power_points >= 2:
            power = SweepAxis(
                "power_mw",
                args.power_min if args.power_min is not None else 0.1,
                args.power_max if args.power_max is not None else 12.0,
                args.power_points,
            )
            spec = SweepSpec(axis1=gq, axis2=power, outputs=("peaks",))
            cols, rows = run_sweep(spec, config, workers=args.workers)
        else:
            spec = SweepSpec(axis1=gq, outputs=("peaks",))
            cols, rows = run_sweep(spec, config, workers=args.workers)
            cols.insert(1, "power_mw")
            for r in rows:
                r["power_mw"] = config["power_mw"]
        _emit(args, "peaks", cols, rows, config)
        return 0

    # figures
    kwargs = {"workers": args.workers}
    if cmd.startswith("fig2"):
        kwargs.update(
            method=args.method,
            oracle=args.oracle,
            omega_range=(args.omega_min, args.omega_max),
            omega_points=args.omega_points,
        )
    cols, rows, extra = run_figure(cmd, config, **kwargs)
    _emit(args, cmd, cols, rows, config, extra)
    return 0


def _write_json(args, name, text) -> None:
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"{name}.json"
        path.write_text(text + "\n", encoding="utf-8")
        print(path)
    else:
        print(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _run(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
