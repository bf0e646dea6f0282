"""Command-line entry point: ``thermoweak {eval,sweep,figure,validate,calibrate}``.

Exit codes: 0 success, 1 validation (or calibration) failure, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from ..calibration import calibrate_convention
from ..conventions import resolve
from ..errors import CalibrationAmbiguous, InvalidConfiguration, ThermoWeakError
from .config import load_setup, load_sweep, read_pairs
from .figures import PRESETS, write_figure
from .sweep import ENGINES, QUANTITIES, _cell, _safe, analytic_quantities, oracle_quantities, run_sweep
from .validation import validate

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InvalidConfiguration(f"cannot read {path}: {exc.strerror}") from None


def cmd_eval(args) -> int:
    text = _read_text(args.config) if args.config else ""
    if args.set:
        text += "\n" + "\n".join(args.set)
    setup = load_setup(text)
    conv = resolve(read_pairs(text).get("convention", args.convention).strip())
    engines = ["analytic", "oracle"] if args.engine == "both" else [args.engine]
    out = [f"convention = {conv.name}"]
    for engine in engines:
        if engine == "analytic":
            values, status = _safe(analytic_quantities, setup, conv)
        else:
            values, status = _safe(oracle_quantities, setup)
        out.append(f"[{engine}]")
        out.append(f"status = {status}")
        for q in QUANTITIES:
            out.append(f"{q} = {_cell(values[q]) if values else 'nan'}")
    print("\n".join(out))
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec, conv, engine, workers = load_sweep(_read_text(args.config))
    engine = args.engine or engine or "analytic"
    if engine not in ENGINES:
        raise InvalidConfiguration(f"engine must be one of {ENGINES}")
    table = run_sweep(spec, engine, conv, args.workers or workers)
    table.write_csv(args.out)
    return EXIT_OK


def cmd_figure(args) -> int:
    ids = sorted(PRESETS) if args.id == "all" else [args.id]
    for fig in ids:
        out = Path(args.out) / fig if len(ids) > 1 else Path(args.out)
        for path in write_figure(fig, out, args.workers):
            print(path)
    return EXIT_OK


def cmd_validate(args) -> int:
    report = validate(args.grid, args.seed, args.paper_mode, args.workers)
    sys.stdout.write(report.format())
    return EXIT_OK if report.passed else EXIT_FAIL


def cmd_calibrate(args) -> int:
    try:
        result = calibrate_convention()
    except CalibrationAmbiguous as exc:
        print(f"calibration ambiguous: {exc}", file=sys.stderr)
        return EXIT_FAIL
    c = result.convention
    lines = [
        f"kappa = {c.kappa:.12g}",
        f"kappa_tilde = {c.kappa_tilde:.12g}",
        f"m = {c.phase_multiplicity}",
        f"squeeze_phase_offset = {c.squeeze_phase_offset:.12g}",
        f"coherence_rate = {c.coherence_rate}",
        f"correlation_shift = {c.correlation_shift}",
        f"probes = {len(result.probes)}",
        f"kappa spread = {np.ptp(result.kappa_estimates):.3e}",
        f"kappa_tilde spread = {np.ptp(result.kappa_tilde_estimates):.3e}",
        f"max quadratic-fit residual = {result.fit_residual:.3e}",
    ]
    for (m, corr), dev in sorted(result.protocol_deviation.items()):
        lines.append(f"candidate m={m} correlation_shift={corr}: max deviation {dev:.3e}")
    print("\n".join(lines))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thermoweak", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate one setup")
    p.add_argument("--config", help="setup file (dotted keys)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a key, repeatable")
    p.add_argument("--engine", choices=ENGINES, default="analytic")
    p.add_argument("--convention", choices=("calibrated", "paper"), default="calibrated")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="run a parameter sweep and write CSV")
    p.add_argument("--config", required=True)
    p.add_argument("--engine", choices=ENGINES)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=0)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure", help="write curve tables for a figure preset")
    p.add_argument("--id", required=True, choices=sorted(PRESETS) + ["all"])
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("validate", help="oracle vs closed-form comparison on random setups")
    p.add_argument("--grid", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--paper-mode", action="store_true", help="skip calibration, use printed constants")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("calibrate", help="measure the convention constants")
    p.set_defaults(func=cmd_calibrate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvalidConfiguration as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ThermoWeakError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
