"""Command-line entry point: ``adlab run | catalog | repro-paper``."""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__, catalog, repro, runner


def _cmd_run(args) -> int:
    try:
        with open(args.config) as fh:
            config = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return runner.EXIT_VALIDATION
    try:
        report, tables = runner.run(config, seed=args.seed,
                                    base_dir=os.path.dirname(os.path.abspath(args.config)))
    except Exception as exc:  # mapped to documented exit codes below
        code = runner.exit_code_for(exc)
        if isinstance(exc, runner.ConfigError):
            for msg in exc.errors:
                print(f"invalid config: {msg}", file=sys.stderr)
        else:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        if code == runner.EXIT_OTHER and os.environ.get("ADLAB_TRACEBACK"):
            raise
        return code
    stem = config.get("name") or os.path.splitext(os.path.basename(args.config))[0]
    if args.out:
        for path in runner.write_outputs(report, tables, args.out, stem):
            print(path)
    else:
        sys.stdout.write(runner.dumps(report))
    return runner.EXIT_OK


def _cmd_catalog(args) -> int:
    for entry in catalog.builtin_catalog():
        params = ", ".join(f"{k}={v}" for k, v in entry.defaults.items())
        line = f"{entry.name:14} {entry.description}"
        if params:
            line += f"  [{params}]"
        print(line)
        if args.show:
            print("    " + json.dumps(catalog.entry_json(entry.name), sort_keys=True))
    return runner.EXIT_OK


def _cmd_repro(args) -> int:
    report = repro.run_all(args.seed)
    print(repro.table(report))
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        path = os.path.join(args.out, "repro.json")
        with open(path, "w") as fh:
            fh.write(runner.dumps(report))
        print(path)
    return runner.EXIT_OK if all(r["passed"] for r in report["rows"]) else runner.EXIT_OTHER


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adlab", description="Dynamical and arithmetic degree experiments.")
    parser.add_argument("--version", action="version", version=f"adlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one experiment from a JSON config")
    p.add_argument("config")
    p.add_argument("--out", help="directory for the JSON report and CSV tables (default: print JSON)")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("catalog", help="list the built-in maps")
    p.add_argument("--show", action="store_true", help="print each map's JSON definition")
    p.set_defaults(func=_cmd_catalog)

    p = sub.add_parser("repro-paper", help="run the reproduction suite and print a pass/fail table")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--out", help="directory for repro.json")
    p.set_defaults(func=_cmd_repro)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
