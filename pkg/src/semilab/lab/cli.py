"""Command line: run <config>, preset <name>, list, schema."""

from __future__ import annotations

import argparse
import json
import sys

from .config import ConfigError, load
from .presets import list_presets, preset_config
from .report import OUT_ENV, REPORT_SCHEMA, run_config


def _print_report(rep, stream=None):
    stream = stream or sys.stdout
    for v in rep.verdicts:
        line = f"{v.status.upper():5s} {v.check:12s} {v.wall_time:8.2f}s  {v.statement}"
        if v.message:
            line += f"  [{v.message}]"
        print(line, file=stream)
    print(f"report: {rep.outdir / 'report.json'}", file=stream)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="semilab", description="Numerical lab for -Δu = λ f(u), λ < 0.")
    sub = ap.add_subparsers(dest="cmd", required=True)
    p = sub.add_parser("run", help="run an experiment config (TOML)")
    p.add_argument("config")
    p.add_argument("--out", help=f"output directory (default: ${OUT_ENV}/<name>)")
    p = sub.add_parser("preset", help="run an embedded preset")
    p.add_argument("name")
    p.add_argument("--out", help=f"output directory (default: ${OUT_ENV}/<name>)")
    p.add_argument("--lambda-max", type=float, help="drop schedule values with -λ above this")
    p.add_argument("--config", help="TOML file whose tables override the preset")
    sub.add_parser("list", help="list presets")
    sub.add_parser("schema", help="print the report.json JSON schema")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.cmd == "list":
        for name, desc in list_presets():
            print(f"{name:20s} {desc}")
        return 0
    if args.cmd == "schema":
        print(json.dumps(REPORT_SCHEMA, indent=2))
        return 0
    try:
        if args.cmd == "run":
            cfg = load(args.config)
        else:
            override = None
            if args.config:
                import dataclasses

                base = load(args.config)
                override = {k: v for k, v in dataclasses.asdict(base).items()
                            if k in ("solver", "options", "output", "seed") and v}
            cfg = preset_config(args.name, override, args.lambda_max)
    except (ConfigError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        rep = run_config(cfg, args.out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    _print_report(rep)
    return 0 if rep.passed else 1


if __name__ == "__main__":
    sys.exit(main())
