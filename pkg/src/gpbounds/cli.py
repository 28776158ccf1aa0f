"""Command-line entry point.

    gpbounds <kind> --config cfg.json [--seed N] [--out DIR] [--workers N]
                    [--svg] [--check]
    gpbounds report --out DIR

<kind> is one of: greedy, gp-concentration, chi2, spheres, bound-table.
Exit codes: 0 success; 2 config error; 3 numerical failure; 4 self-check
failure (only with --check).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .config import KINDS, load_json, validate_config
from .errors import ConfigError, NumericalError
from .experiments import run_experiment
from .reporting import emit_report


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="gpbounds",
        description="Monte-Carlo verification of concentration bounds for "
                    "conditioned Gaussian random variables.")
    sub = p.add_subparsers(dest="command", required=True)
    for kind in KINDS:
        sp = sub.add_parser(kind, help=f"run a {kind} experiment")
        sp.add_argument("--config", required=True, help="JSON config file")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the config master seed (u64)")
        sp.add_argument("--out", default=None, help="output directory")
        sp.add_argument("--workers", type=int, default=1,
                        help="worker processes for Monte-Carlo replicates")
        sp.add_argument("--svg", action="store_true", help="also render an SVG plot")
        sp.add_argument("--check", action="store_true",
                        help="exit 4 if any self-check fails")
    rp = sub.add_parser("report", help="print the digest of an existing run directory")
    rp.add_argument("--out", required=True, help="run directory holding report.json")
    return p


def _run(args) -> int:
    cfg = validate_config(load_json(args.config))
    if cfg["kind"] != args.command:
        raise ConfigError(
            f"config kind {cfg['kind']!r} does not match subcommand {args.command!r}")
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must fit in u64")
        cfg["seed"] = args.seed
    if args.workers < 1:
        raise ConfigError("--workers must be >= 1")
    outdir = args.out or cfg.get("out") or f"gpbounds-{cfg['kind']}"
    report = run_experiment(cfg, workers=args.workers)
    emit_report(report, outdir, svg=args.svg)
    for c in report.checks:
        status = "ok" if c["passed"] else "FAIL"
        extra = "" if c["passed"] else f": {c['detail']}"
        print(f"[{status}] {c['name']}{extra}")
    print(f"wrote {os.path.join(outdir, 'results.csv')} ({len(report.rows)} rows)")
    if args.check and not report.all_checks_passed:
        return 4
    return 0


def _report_cmd(args) -> int:
    path = os.path.join(args.out, "report.json")
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path} is not valid JSON: {e}") from e
    print(f"kind: {data.get('kind')}")
    counts = {}
    for row in data.get("rows", []):
        counts[row.get("record", "?")] = counts.get(row.get("record", "?"), 0) + 1
    for rec in sorted(counts):
        print(f"rows[{rec}]: {counts[rec]}")
    summary = data.get("summary", {})
    if summary:
        print("summary:")
        for key in sorted(summary):
            print(f"  {key}: {summary[key]}")
    checks = data.get("checks", [])
    failed = [c for c in checks if not c.get("passed")]
    for c in checks:
        status = "ok" if c.get("passed") else "FAIL"
        extra = f": {c.get('detail')}" if not c.get("passed") else ""
        print(f"[{status}] {c.get('name')}{extra}")
    print(f"checks: {len(checks) - len(failed)}/{len(checks)} passed")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "report":
            return _report_cmd(args)
        return _run(args)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except NumericalError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
