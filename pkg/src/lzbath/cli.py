"""Command-line interface.

    lzbath evolve --config cfg.json [--set key=value ...] [--out path]
    lzbath lzprob --config cfg.json [--workers n] [--out path | --out-dir dir]
    lzbath thermo ...
    lzbath rates  ...

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys

from . import harness
from .errors import ConfigError, NumericalError

_COMMANDS = {
    "evolve": harness.cmd_evolve,
    "lzprob": harness.cmd_lzprob,
    "thermo": harness.cmd_thermo,
    "rates": harness.cmd_rates,
}

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lzbath",
        description="Driven two-level system in a bosonic bath: evolution, "
                    "sweeps, rate curves, thermodynamics (CSV output).")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("evolve", "integrate one trajectory and write it as CSV"),
        ("lzprob", "transition-probability sweep over v or T"),
        ("thermo", "entropy-balance sweep over v or T"),
        ("rates", "dissipator coefficient curves on the rate grid"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON configuration file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config key (JSON-typed value)")
        p.add_argument("--out", help="output CSV path (single-run configs)")
        p.add_argument("--out-dir", help="output directory (multi-run configs)")
        p.add_argument("--workers", type=int, help="sweep worker processes")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        runs, cfg_out_dir = harness.load_config(
            args.config, args.command, sets=args.set, workers=args.workers)
        out_dir = args.out_dir or cfg_out_dir
        written = _COMMANDS[args.command](runs, out=args.out, out_dir=out_dir)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    for path in written:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
