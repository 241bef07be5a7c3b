"""Command-line entry point.

    fermidouble run <config.json> [--output DIR] [--threads N]
    fermidouble oracle-suite [--seed N] [--output DIR]

Exit codes: 0 all gates pass, 1 numerical gate failure, 2 configuration
error, 3 capacity exceeded.
"""
from __future__ import annotations

import argparse
import json
import sys

from .config import load_config, validate_config
from .exceptions import CapacityError, ConfigurationError
from .experiments import oracle_suite, run

EXIT_PASS = 0
EXIT_GATE = 1
EXIT_CONFIG = 2
EXIT_CAPACITY = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fermidouble")
    sub = parser.add_subparsers(dest="command", required=True)

    runp = sub.add_parser("run", help="run one experiment from a JSON config")
    runp.add_argument("config", help="path to the experiment config")
    runp.add_argument("--output", default=None, help="output directory root")
    runp.add_argument("--threads", type=int, default=1, help="worker threads for grids")

    orp = sub.add_parser("oracle-suite", help="run every independent-oracle comparison")
    orp.add_argument("--seed", type=int, default=0)
    orp.add_argument("--output", default=None, help="optional report path (JSON)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)

    if args.command == "oracle-suite":
        checks = oracle_suite(args.seed)
        report = json.dumps({"checks": checks, "passed": all(c["passed"] for c in checks)},
                            indent=2, sort_keys=True)
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(report)
        print(report)
        failing = [c["oracle"] for c in checks if not c["passed"]]
        if failing:
            print(f"FAILED oracles: {', '.join(failing)}", file=sys.stderr)
            return EXIT_GATE
        return EXIT_PASS

    try:
        cfg = load_config(args.config)
    except ConfigurationError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        manifest, outdir = run(cfg, output=args.output, threads=args.threads)
    except CapacityError as err:
        print(f"capacity exceeded: {err}", file=sys.stderr)
        return EXIT_CAPACITY
    except ConfigurationError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as err:  # manifest with the error cause is already on disk
        print(f"experiment failed: {err}", file=sys.stderr)
        return EXIT_GATE

    print(f"{cfg.experiment}/{cfg.name}: {'PASS' if manifest.passed else 'FAIL'} -> {outdir}")
    return EXIT_PASS if manifest.passed else EXIT_GATE


if __name__ == "__main__":
    raise SystemExit(main())
