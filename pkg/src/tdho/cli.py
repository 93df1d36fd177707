"""Command-line entry point: ``tdho profile|evolve|verify|sweep [--config PATH] [--key value ...]``."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import commands, config, verify
from .errors import ConfigurationError, ConservationError, EdgeLeakError, SingularityError

log = logging.getLogger("tdho")

EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="\n", encoding="ascii") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from None


def run_profile(cfg) -> int:
    header, rows = commands.profile_table(cfg)
    _write(cfg.output.path, commands.to_csv(header, rows))
    return 0


def run_evolve(cfg) -> int:
    header, rows = commands.evolve_table(cfg)
    _write(cfg.output.path, commands.to_csv(header, rows))
    return 0


def run_sweep(cfg) -> int:
    header, rows = commands.sweep_table(cfg)
    _write(cfg.output.path, commands.to_csv(header, rows))
    return 0


def _colour(status: str, enabled: bool) -> str:
    if not enabled:
        return status
    code = "32" if status == "PASS" else "31"
    return f"\x1b[{code}m{status}\x1b[0m"


def format_check(check: verify.Check, colour: bool = False) -> str:
    if check.threshold is None:
        bound = "(diagnostic)"
    elif check.mode == "near":
        bound = f"{commands.fmt(check.expected)} +/- {check.threshold:.0e}"
    else:
        op = "<=" if check.mode == "max" else ">="
        bound = f"{op} {check.threshold:.6g}"
    return f"{check.name:<28} {commands.fmt(check.value):>20}  {bound:<28} {_colour(check.status, colour)}"


def run_verify(cfg, colour: bool = False) -> int:
    checks = verify.run_checks(cfg)
    records = "".join(json.dumps(c.record()) + "\n" for c in checks)
    if cfg.output.format == "jsonl":
        sys.stdout.write(records)
    else:
        for c in checks:
            print(format_check(c, colour))
    if cfg.output.report:
        _write(cfg.output.report, records)
    failures = sum(not c.passed for c in checks)
    if cfg.output.format == "text":
        print(f"{len(checks) - failures}/{len(checks)} checks passed")
    return min(failures, 125)


COMMANDS = {
    "profile": run_profile,
    "evolve": run_evolve,
    "verify": run_verify,
    "sweep": run_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tdho",
        allow_abbrev=False,
        description="Invariant-based dynamics of a harmonic oscillator with a frequency step.",
        epilog="Any config key may be overridden with --key value (e.g. --omega2 3 --dt 1e-4).",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="sectioned key = value file")
    parser.add_argument("--no-color", action="store_true", help="plain output without ANSI colour")
    parser.add_argument("--dump-config", action="store_true",
                        help="print the effective configuration and exit")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args, rest = parser.parse_known_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        cfg = config.load(args.config, rest)
        if args.dump_config:
            sys.stdout.write(config.dumps(cfg))
            return 0
        if args.command == "verify":
            colour = not args.no_color and "NO_COLOR" not in os.environ and sys.stdout.isatty()
            return run_verify(cfg, colour)
        return COMMANDS[args.command](cfg)
    except ConfigurationError as exc:
        print(f"tdho: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (SingularityError, ConservationError, EdgeLeakError) as exc:
        print(f"tdho: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"tdho: I/O error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
