"""Command-line entry point.

    lasernoise sweep CONFIG [--output DIR] [--seed N] [--threads N]
                            [--methods LIST] [--plots | --no-plots]
    lasernoise preset NAME [-o FILE]
    lasernoise validate CONFIG

Exit codes: 0 success, 1 configuration error, 2 runtime failure.  The
default output directory may also be set through LASERNOISE_OUTDIR.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from pathlib import Path

from .config import (ConfigError, METHODS, dump_config, load_config,
                     parse_config, preset_config_text)
from .presets import PRESETS

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lasernoise",
        description="Stochastic nanolaser noise simulator (rates in 1/ps)")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("sweep", help="run the sweep described by a config file")
    run.add_argument("config", help="path to the INI configuration")
    run.add_argument("--output", help="output directory (overrides config)")
    run.add_argument("--seed", type=int, help="base seed (overrides config)")
    run.add_argument("--threads", type=int, help="worker threads (overrides config)")
    run.add_argument("--methods", help="comma-separated subset of "
                                       + ",".join(METHODS))
    group = run.add_mutually_exclusive_group()
    group.add_argument("--plots", dest="plots", action="store_true",
                       default=None, help="emit SVG plots")
    group.add_argument("--no-plots", dest="plots", action="store_false",
                       default=None)

    pre = sub.add_parser("preset", help="write a ready-to-edit preset config")
    pre.add_argument("name", choices=sorted(PRESETS))
    pre.add_argument("-o", "--output", help="file to write (default: stdout)")

    val = sub.add_parser("validate", help="parse a config and echo its "
                                          "canonical form")
    val.add_argument("config")
    return parser


def _apply_overrides(config, args):
    if args.output is not None:
        config = replace(config, output_dir=args.output)
    elif os.environ.get("LASERNOISE_OUTDIR"):
        config = replace(config, output_dir=os.environ["LASERNOISE_OUTDIR"])
    if args.seed is not None:
        config = replace(config, base_seed=args.seed)
    if args.threads is not None:
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        config = replace(config, threads=args.threads)
    if args.methods is not None:
        methods = tuple(m for m in args.methods.replace(",", " ").split() if m)
        for m in methods:
            if m not in METHODS:
                raise ConfigError(f"--methods: unknown method {m!r}")
        config = replace(config, methods=methods)
        # revalidate the me emitter cap against the sweep
        parse_config(dump_config(config))
    if args.plots is not None:
        config = replace(config, plots=args.plots)
    return config


def _cmd_sweep(args) -> int:
    from .plots import emit_plots
    from .sweep import sweep, write_rows

    config = _apply_overrides(load_config(args.config), args)
    outdir = Path(config.output_dir)
    outdir.mkdir(parents=True, exist_ok=True)
    rows, payload = sweep(config, keep_trajectories=config.plots)
    csv_path = outdir / "sweep.csv"
    write_rows(rows, csv_path)
    print(f"wrote {csv_path} ({len(rows)} rows)")
    failures = [r for r in rows if r.status == "error"]
    for row in failures:
        print(f"  point n0={row.n0} P={row.pump_per_emitter:g} "
              f"[{row.method}] failed: {row.message}", file=sys.stderr)
    if config.plots:
        for path in emit_plots(rows, payload, outdir):
            print(f"wrote {path}")
    return EXIT_RUNTIME if failures else EXIT_OK


def _cmd_preset(args) -> int:
    text = preset_config_text(args.name)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_validate(args) -> int:
    config = load_config(args.config)
    sys.stdout.write(dump_config(config))
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "preset":
            return _cmd_preset(args)
        if args.command == "validate":
            return _cmd_validate(args)
        raise AssertionError(f"unhandled command {args.command}")
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
