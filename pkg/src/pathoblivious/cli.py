"""Command-line entry point.

    pathoblivious [--seed N] run --config scenario.json
    pathoblivious [--seed N] sweep --spec sweep.json --out results.csv [--workers K]
    pathoblivious [--seed N] lp --config scenario.json --objective max-c [--export model.lp] [--out sol.csv]

Exit codes: 0 success, 2 config error, 3 incomplete run, 4 I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .config import load_scenario, load_sweep
from .errors import ConfigError, PathObliviousError
from .experiments import (
    OBJECTIVES,
    RUN_COLUMNS,
    metrics_row,
    rate_problem,
    rows_csv,
    run_sweep,
    solve_objective,
    write_atomic,
)
from .lp.model import export_lp_text, solution_csv
from .sim import run

EXIT_OK, EXIT_CONFIG, EXIT_INCOMPLETE, EXIT_IO = 0, 2, 3, 4


def _scenario(args):
    config = load_scenario(args.config)
    if args.seed is not None:
        config = config.model_copy(update={"seed": args.seed})
    return config


def cmd_run(args) -> int:
    config = _scenario(args)
    metrics = run(config)
    sys.stdout.write(rows_csv(RUN_COLUMNS, [metrics_row(config, metrics)]))
    return EXIT_OK if metrics.complete else EXIT_INCOMPLETE


def cmd_sweep(args) -> int:
    spec = load_sweep(args.spec)
    if args.seed is not None:
        spec = spec.model_copy(update={"seeds": [args.seed]})
    if args.workers < 1:
        raise ConfigError("workers", "must be at least 1")
    write_atomic(args.out, run_sweep(spec, workers=args.workers))
    return EXIT_OK


def _phase_path(path: Path, label: str) -> Path:
    return path.with_name(f"{path.stem}.{label}{path.suffix}")


def cmd_lp(args) -> int:
    config = _scenario(args)
    blocks = solve_objective(rate_problem(config), args.objective)
    if args.export:
        # the first block keeps the given name, later phases get a label suffix
        export = Path(args.export)
        write_atomic(export, export_lp_text(blocks[0][1]))
        for label, model, _ in blocks[1:]:
            write_atomic(_phase_path(export, label), export_lp_text(model))
    text = solution_csv((label, sol) for label, _, sol in blocks)
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pathoblivious",
                                     description="Path-oblivious Bell-pair distribution experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one scenario and print its metrics row")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run a distill or node-count sweep to a CSV file")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("lp", help="solve a steady-state rate program")
    p.add_argument("--config", required=True)
    p.add_argument("--objective", required=True, choices=OBJECTIVES)
    p.add_argument("--export", help="also write the model in LP format")
    p.add_argument("--out", help="solution CSV path (default: stdout)")
    p.set_defaults(func=cmd_lp)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    if args.seed is not None and not 0 <= args.seed < 2**64:
        print("error: seed: must be a 64-bit unsigned integer", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except PathObliviousError as exc:  # ConfigError, LpBuildError, topology errors
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
