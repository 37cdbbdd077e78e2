"""Command-line entry point: ``secsat run``."""

from __future__ import annotations

import argparse
import sys

from .errors import ConvergenceError, DomainError, ScenarioError
from .experiments import PRESETS, emit_csv, load_scenario, preset, run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CONVERGENCE = 3
EXIT_IO = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _u64(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="secsat", description="Secrecy outage simulations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    run = sub.add_parser("run", help="run a scenario and write its SOP curves as CSV")
    src = run.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=sorted(PRESETS), help="published-figure preset")
    src.add_argument("--config", metavar="PATH", help="JSON scenario file")
    run.add_argument("--out", metavar="PATH", help="CSV destination (default: stdout)")
    run.add_argument(
        "--seed", type=_u64, help="RNG seed (default: the scenario's, 42 for presets)"
    )
    run.add_argument("--trials", type=_positive, help="override the scenario's trial count")
    run.add_argument("--threads", type=_positive, help="worker threads (default: all cores)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        overrides = {}
        if args.seed is not None:
            overrides["seed"] = args.seed
        if args.trials is not None:
            overrides["trials"] = args.trials
        if args.preset:
            scenario = preset(args.preset, **overrides)
        else:
            scenario = load_scenario(args.config).replace(**overrides)
        curves = run_scenario(scenario, threads=args.threads)
        emit_csv(curves, args.out if args.out else sys.stdout)
    except (ScenarioError, DomainError) as exc:
        print(f"secsat: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"secsat: numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"secsat: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
