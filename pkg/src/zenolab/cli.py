"""Command line entry point ``zeno``.

Exit codes: 0 success, 1 a check failed, 2 invalid input or gap failure,
3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

from .errors import ConvergenceError, GapError, SpectralError, WindowError
from .harness.checks import SUITES, run_suite
from .harness.config import ScenarioError, resolve_scenario
from .harness.emit import csv_text, emit
from .harness.sweep import run_sweep
from .spectral import spectrum_report

log = logging.getLogger("zeno")

EXIT_OK, EXIT_CHECK_FAILED, EXIT_INVALID, EXIT_NONCONVERGENCE = 0, 1, 2, 3
NORM_ALIASES = {"proxy": "proxy", "rank1": "rank1_lower", "rank1_lower": "rank1_lower",
                "trace": "trace"}


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _cmd_run(args) -> int:
    cfg = resolve_scenario(args.scenario, args.seed)
    changes = {}
    if args.ns is not None:
        changes["sweep"] = args.ns
    if args.norm is not None:
        changes["norm_kind"] = NORM_ALIASES[args.norm]
    if changes:
        cfg = replace(cfg, **changes)
    result = run_sweep(cfg, workers=args.workers)
    if args.out:
        emit(result, "csv", args.out)
    if args.json:
        emit(result, "json", args.json)
    if args.plot:
        emit(result, "svg", args.plot)
    if not (args.out or args.json or args.plot):
        sys.stdout.write(csv_text(result))
    slope = "n/a" if result.slope is None else f"{result.slope:.4f}"
    log.info("%s: %d points, final error %s, log-log slope %s", result.scenario,
             len(result.records), result.final_error, slope)
    return EXIT_OK


def _cmd_check(args) -> int:
    results = run_suite(args.suite)
    for r in results:
        print(r.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_CHECK_FAILED


def _cmd_spectrum(args) -> int:
    cfg = resolve_scenario(args.scenario, args.seed)
    print(f"scenario: {cfg.name}")
    print(spectrum_report(cfg.M, args.gap_min or cfg.gap_min).summary())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS,
                        help="log progress to stderr")
    parser = argparse.ArgumentParser(prog="zeno", description="Zeno-limit simulation and checks",
                                     parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", parents=[common], help="sweep n and measure the distance to the Zeno limit")
    run.add_argument("--scenario", required=True, help="builtin name or scenario JSON file")
    run.add_argument("--ns", type=_int_list, help="comma-separated interception counts")
    run.add_argument("--norm", choices=sorted(NORM_ALIASES))
    run.add_argument("--out", help="CSV output path")
    run.add_argument("--json", help="JSON output path")
    run.add_argument("--plot", help="SVG output path")
    run.add_argument("--seed", type=int)
    run.add_argument("--workers", type=int, default=None)
    run.set_defaults(func=_cmd_run)

    check = sub.add_parser("check", parents=[common], help="run inequality self-check suites")
    check.add_argument("--suite", choices=SUITES + ("all",), default="all")
    check.set_defaults(func=_cmd_check)

    spectrum = sub.add_parser("spectrum", parents=[common], help="print the spectral report of a scenario's M")
    spectrum.add_argument("--scenario", required=True)
    spectrum.add_argument("--gap-min", type=float, default=None)
    spectrum.add_argument("--seed", type=int)
    spectrum.set_defaults(func=_cmd_spectrum)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (ScenarioError, GapError, WindowError, ValueError, FileNotFoundError) as exc:
        print(f"zeno: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ConvergenceError, SpectralError) as exc:
        print(f"zeno: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
