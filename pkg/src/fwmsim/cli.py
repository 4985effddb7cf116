"""Command-line front end.

Exit codes: 0 success, 1 no solution (or failed oracle check), 2 config
error, 3 Fock-space size guard tripped.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import commands
from .config import ConfigError, load_config
from .errors import DimensionGuard, NoSolution

log = logging.getLogger("fwmsim")

EXIT_OK, EXIT_NO_SOLUTION, EXIT_CONFIG, EXIT_GUARD = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="INI config overlaid on the shipped defaults")
    common.add_argument("--out", type=Path, help="write the table here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, help="overrides [run] seed")
    common.add_argument("--workers", type=int, default=1, help="processes for sweeps")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="fwmsim", description="Dual-pump four-wave-mixing simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("phase-match", "solve the cone and four-mode phase-matching geometry"),
        ("evolve", "evolve vacuum under the configured couplings and report metrics"),
        ("sweep-ratio", "sweep the pump power ratio at fixed total power"),
        ("sweep-strength", "sweep one named parameter from [sweep]"),
        ("compare-configs", "rank four-mode against six-mode configurations"),
        ("entanglement", "log-negativity, pair squeezing and correlation edges"),
        ("oracle-check", "compare the Gaussian engine with the truncated-Fock oracle"),
    ):
        sub.add_parser(name, parents=[common], help=help_text)
    return parser


def _emit(table, args) -> None:
    text = table.to_json() if args.format == "json" else table.to_csv()
    if args.out is None:
        sys.stdout.write(text)
    else:
        args.out.write_text(text)


def run(args) -> int:
    if args.workers < 1:
        raise ConfigError("--workers must be >= 1", key="workers")
    cfg = load_config(args.config)
    if args.seed is not None:
        if args.seed < 0:
            raise ConfigError("--seed must be >= 0", key="seed")
        cfg = replace(cfg, seed=args.seed)

    if args.command == "phase-match":
        table = commands.phase_match(cfg)
    elif args.command == "evolve":
        table = commands.evolve_report(cfg)
    elif args.command == "sweep-ratio":
        table = commands.sweep_ratio(cfg, args.workers)
    elif args.command == "sweep-strength":
        table = commands.sweep_strength(cfg, args.workers)
    elif args.command == "compare-configs":
        table = commands.compare_configs(cfg)
    elif args.command == "entanglement":
        table = commands.entanglement(cfg)
    else:
        table, ok = commands.oracle_check(cfg)
        _emit(table, args)
        if not ok:
            log.error("oracle deviation above %g", commands.ORACLE_TOLERANCE)
            return EXIT_NO_SOLUTION
        return EXIT_OK
    _emit(table, args)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return run(args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except NoSolution as exc:
        log.error("no solution: %s", exc)
        return EXIT_NO_SOLUTION
    except DimensionGuard as exc:
        log.error("guard tripped: %s", exc)
        return EXIT_GUARD


if __name__ == "__main__":
    sys.exit(main())
