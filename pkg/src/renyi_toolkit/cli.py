"""Command-line entry point.

Subcommands group the harness checks by topic; ``suite`` runs any subset
and ``suite --full`` runs the complete battery at full-battery trial
counts.  Exit status: 0 when every executed check passed, 1 when any
check recorded a failure, 2 on bad arguments.
"""

from __future__ import annotations

import argparse
import csv
import sys

from .harness import CHECK_GROUPS, CHECKS, SuiteConfig, full_config, run_suite
from .serialize import dump_json

__all__ = ["main", "build_parser"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="renyi-toolkit",
        description="Randomized verification of Renyi divergence inequalities, "
        "pretty good measures and their optimality conditions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
        p.add_argument(
            "--dims",
            type=int,
            nargs="+",
            default=[2, 3, 4],
            metavar="D",
            help="Hilbert space dimensions to draw from",
        )
        p.add_argument(
            "--trials", type=int, default=25, help="trials per check (default 25)"
        )
        p.add_argument(
            "--alpha",
            type=float,
            nargs="+",
            default=[0.1, 0.25, 0.5, 0.75, 0.9],
            metavar="A",
            help="alpha grid for checks that take one",
        )
        p.add_argument("--out", type=str, default=None, help="write the report here")
        p.add_argument(
            "--format",
            choices=("json", "csv"),
            default="json",
            help="report format for --out (default json)",
        )

    for group in CHECK_GROUPS:
        p = sub.add_parser(group, help=f"run the {group} checks")
        add_common(p)

    p = sub.add_parser("suite", help="run a configurable batch of checks")
    add_common(p)
    p.add_argument(
        "--checks",
        type=str,
        nargs="+",
        default=None,
        metavar="NAME",
        help="explicit check names (default: all)",
    )
    p.add_argument(
        "--full",
        action="store_true",
        help="run the complete battery at full-battery trial counts",
    )
    p = sub.add_parser("list", help="list available checks")

    p = sub.add_parser("rerun", help="re-evaluate a persisted witness from a report")
    p.add_argument("report", type=str, help="path to a JSON report")
    p.add_argument("--check", type=str, required=True, help="check name to re-run")
    return parser


def _write_report(report, path: str, fmt: str) -> None:
    if fmt == "json":
        dump_json(report.to_dict(), path)
    else:
        with open(path, "w", newline="", encoding="utf-8") as handle:
            writer = csv.writer(handle)
            writer.writerows(report.to_csv_rows())


def _print_summary(report) -> None:
    width = max(len(name) for name in report.checks)
    for name in sorted(report.checks):
        result = report.checks[name]
        status = "pass" if result.failures == 0 else "FAIL"
        print(
            f"{name:<{width}}  {status}  trials={result.trials:>6} "
            f"failures={result.failures:>4}  worst_slack={result.worst_slack:.3e}"
        )
    print(
        f"total: {sum(r.trials for r in report.checks.values())} trials, "
        f"{report.failures} failures, {report.wall_time:.1f}s"
    )


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command == "list":
        width = max(len(name) for name in CHECKS)
        for name, check in sorted(CHECKS.items()):
            print(f"{name:<{width}}  {check.description}")
        return 0

    if args.command == "rerun":
        from .harness import rerun_witness
        from .serialize import load_json

        payload = load_json(args.report)
        try:
            witness = payload["checks"][args.check]["witness"]
        except KeyError:
            parser.error(f"report has no witness for check {args.check!r}")
            return 2
        outcome = rerun_witness(args.check, witness)
        drift = abs(outcome.slack - witness["slack"])
        print(
            f"{args.check}: holds={outcome.holds} slack={outcome.slack!r} "
            f"recorded={witness['slack']!r} drift={drift:.3e}"
        )
        return 0 if outcome.holds == witness["holds"] and drift <= 1e-12 else 1

    try:
        if args.command == "suite":
            if args.full:
                config = full_config(seed=args.seed)
                if args.checks:
                    config = SuiteConfig(
                        seed=args.seed,
                        checks=tuple(args.checks),
                        trial_overrides=dict(config.trial_overrides),
                    )
            else:
                config = SuiteConfig(
                    seed=args.seed,
                    dims=tuple(args.dims),
                    trials=args.trials,
                    alphas=tuple(args.alpha),
                    checks=tuple(args.checks) if args.checks else (),
                )
        else:
            config = SuiteConfig(
                seed=args.seed,
                dims=tuple(args.dims),
                trials=args.trials,
                alphas=tuple(args.alpha),
                checks=tuple(CHECK_GROUPS[args.command]),
            )
        report = run_suite(config)
    except ValueError as exc:
        parser.error(str(exc))  # exits with status 2
        return 2
    _print_summary(report)
    if args.out:
        _write_report(report, args.out, args.format)
        print(f"report written to {args.out}")
    return 0 if report.failures == 0 else 1


if __name__ == "__main__":
    sys.exit(main())
