"""Command-line entry point: ``supnorm-lab {run,preset,sweep,ineqlab,fit}``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from ..exceptions import ConfigurationError
from ..fitting import fit_decay
from ..ineqlab import FAMILIES, CorpusSpec, default_grid, verify_corpus
from ..series import TimeSeries
from .config import load_config
from .presets import PRESETS, get_preset
from .runner import EXIT_CHECKS_FAILED, EXIT_CONFIG_ERROR, EXIT_OK, RunOutcome, run

def _print_outcome(name: str, outcome: RunOutcome) -> None:
    if outcome.report is not None:
        for line in outcome.report.summary_lines():
            print(line)
    if outcome.message:
        print(outcome.message, file=sys.stderr)
    status = "PASS" if outcome.exit_code == EXIT_OK else f"FAIL (exit {outcome.exit_code})"
    where = outcome.paths.get("series")
    print(f"{name}: {status}" + (f" -> {where.parent}" if where else ""))


def cmd_run(args) -> int:
    try:
        config = load_config(args.config)
    except ConfigurationError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG_ERROR
    outcome = run(config, args.out)
    _print_outcome(config.name, outcome)
    return outcome.exit_code


def cmd_preset(args) -> int:
    config = get_preset(args.name)
    overrides = {}
    if args.t_end is not None:
        overrides["run"] = {"t_end": args.t_end}
    if args.cells is not None:
        overrides["grid"] = {"n_cells": args.cells}
    if args.svg:
        overrides["output"] = {"emit_svg": True}
    try:
        config = config.replace(**overrides)
    except ConfigurationError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG_ERROR
    outcome = run(config, args.out or f"out/{args.name}")
    _print_outcome(config.name, outcome)
    return outcome.exit_code


def _sweep_one(path: str, out_root: str):
    try:
        config = load_config(path)
    except ConfigurationError as exc:
        return Path(path).stem, EXIT_CONFIG_ERROR, str(exc)
    outcome = run(config, Path(out_root) / config.name)
    return config.name, outcome.exit_code, outcome.message


def cmd_sweep(args) -> int:
    config_dir = Path(args.config_dir)
    paths = sorted(str(p) for p in config_dir.glob("*.json"))
    if not paths:
        print(f"no *.json configs in {config_dir}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    out_root = args.out or str(config_dir / "out")
    with ProcessPoolExecutor(max_workers=args.jobs) as pool:
        results = list(pool.map(_sweep_one, paths, [out_root] * len(paths)))
    worst = EXIT_OK
    for name, code, message in results:
        print(f"{name}: exit {code}" + (f" ({message})" if message else ""))
        worst = max(worst, code)
    return worst


def cmd_ineqlab(args) -> int:
    try:
        spec = CorpusSpec(seed=args.seed, count=args.count, families=tuple(args.families))
        report = verify_corpus(spec, default_grid(args.cells), tol_ineq=args.tol)
    except ConfigurationError as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG_ERROR
    if args.json:
        print(json.dumps(report.to_dict(), indent=2))
    else:
        print(f"corpus: {report.count} functions, n_cells={report.n_cells}")
        print(f"max nash ratio       {report.max_nash:.6f}  ({report.argmax_nash['family']})")
        print(f"max sup-interp ratio {report.max_sup_interp:.6f}  ({report.argmax_sup_interp['family']})")
        print(f"limit 1 + {report.tolerance:g}: {'PASS' if report.passed else 'FAIL'}")
    return EXIT_OK if report.passed else EXIT_CHECKS_FAILED


def cmd_fit(args) -> int:
    series = TimeSeries.from_csv(args.csv)
    try:
        exponent, r2 = fit_decay(series.scalar(args.column), (args.t_from, args.t_to))
    except (KeyError, ValueError) as exc:
        print(exc, file=sys.stderr)
        return EXIT_CONFIG_ERROR
    print(f"exponent {exponent:.6f}")
    print(f"r_squared {r2:.6f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="supnorm-lab", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a JSON experiment config")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("preset", help="run a built-in scenario")
    p.add_argument("name", choices=sorted(PRESETS))
    p.add_argument("--out")
    p.add_argument("--t-end", type=float)
    p.add_argument("--cells", type=int)
    p.add_argument("--svg", action="store_true", help="also write SVG norm plots")
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("sweep", help="run every *.json config in a directory in parallel")
    p.add_argument("--config-dir", required=True)
    p.add_argument("--out")
    p.add_argument("--jobs", type=int, default=None)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ineqlab", help="check the Nash and sup-interpolation inequalities on a corpus")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=200)
    p.add_argument("--cells", type=int, default=4096)
    p.add_argument("--families", nargs="+", default=list(FAMILIES), choices=FAMILIES)
    p.add_argument("--tol", type=float, default=5e-3)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_ineqlab)

    p = sub.add_parser("fit", help="fit a power-law decay exponent to a CSV column")
    p.add_argument("--csv", required=True)
    p.add_argument("--column", default="linf")
    p.add_argument("--from", dest="t_from", type=float, required=True)
    p.add_argument("--to", dest="t_to", type=float, required=True)
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
