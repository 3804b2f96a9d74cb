"""Batch command-line interface: run a verification suite, emit reports.

Usage: besov-lab <suite> [--config FILE] [--strict] [--out DIR]

Exit status: 0 when every non-inconclusive check passes, 1 on failures or
numerical errors, 2 on usage/config problems.  The only environment override
honored is BESOV_LAB_OUT for the output directory.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import UsageError
from .suites import SUITES, SuiteConfig, run_suite

USAGE_EXIT = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="besov-lab",
        description="Run numerical verification suites for the dual-modulus workbench.",
    )
    parser.add_argument("suite", choices=SUITES, help="which suite to run")
    parser.add_argument("--config", help="JSON config file", default=None)
    parser.add_argument(
        "--strict",
        action="store_true",
        help="treat inconclusive verdicts as failures",
    )
    parser.add_argument("--out", help="output directory", default=None)
    return parser


def load_config(path: str | None, suite: str) -> SuiteConfig:
    doc = {}
    if path is not None:
        try:
            with open(path) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(doc, dict):
            raise UsageError("config must be a JSON object")
    doc["suite"] = suite
    return SuiteConfig.from_dict(doc)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_EXIT if exc.code not in (0,) else 0
    try:
        cfg = load_config(args.config, args.suite)
    except UsageError as exc:
        print(f"besov-lab: {exc}", file=sys.stderr)
        return USAGE_EXIT
    out_dir = (
        args.out
        or os.environ.get("BESOV_LAB_OUT")
        or cfg.out_dir
        or "besov-lab-out"
    )
    code = run_suite(cfg, out_dir, strict=args.strict)
    print(f"besov-lab: suite={cfg.suite} -> {'pass' if code == 0 else 'FAIL'} ({out_dir})")
    return code


if __name__ == "__main__":
    sys.exit(main())
