"""Command line entry point.

`klflow <case> --config <file> [--out <dir>] [--seed <n>] [--jobs <n>]` runs
one case study and prints the CSV paths it wrote; `klflow verify [suite]`
runs property suites and exits nonzero if any property fails.  The
KLFLOW_OUT environment variable overrides --out when set.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys

from .experiments import CASES, make_case, parse_config_file
from .verify import SUITES, run_suites


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="klflow",
        description="Gradient-flow case studies with certified convergence bounds.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in CASES:
        p = sub.add_parser(name, help=f"run the {name} case study")
        p.add_argument("--config", default=None, help="flat key=value config file")
        p.add_argument("--out", default=".", help="output directory for CSV artifacts")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--jobs", type=int, default=1, help="parallel workers (default 1)")
    ver = sub.add_parser("verify", help="run property suites and report a table")
    ver.add_argument(
        "suite",
        nargs="?",
        default="all",
        choices=["all", *SUITES],
        help="suite to run (default: all)",
    )
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.command == "verify":
        results = run_suites(None if args.suite == "all" else [args.suite])
        width = max(len(f"{r.suite}.{r.name}") for r in results)
        for r in results:
            status = "pass" if r.ok else "FAIL"
            line = f"{r.suite + '.' + r.name:<{width}}  {status}  worst margin {r.worst: .3e}"
            if r.detail and not r.ok:
                line += f"  ({r.detail})"
            print(line)
        failed = sum(1 for r in results if not r.ok)
        print(f"{len(results) - failed}/{len(results)} properties passed")
        return 1 if failed else 0

    if args.jobs < 1:
        parser.error("--jobs must be a positive integer")
    cls, runner = CASES[args.command]
    try:
        overrides = parse_config_file(args.config) if args.config else {}
        cfg = make_case(cls, overrides)
        if args.seed is not None:
            cfg = dataclasses.replace(cfg, seed=args.seed)
        out_dir = os.environ.get("KLFLOW_OUT") or args.out
        os.makedirs(out_dir, exist_ok=True)
        paths = runner(cfg, out_dir, jobs=args.jobs)
    except (ValueError, OSError) as exc:
        print(f"klflow {args.command}: {exc}", file=sys.stderr)
        return 2
    for path in paths:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
