#!/usr/bin/env python3

# heckelab
# Command-line entry point: every scan and check of the library is a subcommand.
# Results go to standard output or --out (CSV for scans, JSON for single results);
# logs and errors go to standard error.

import argparse
import json
import sys
import threading
from typing import List, Optional

from connector import ScanConnector
from heckelab import __version__
from heckelab.errors import HeckelabError
from heckelab_config import apply_config, load_config_file
from log_service import LogService, get_logger
from result_store import ResultStore
from scans.base_scan import positive_int
from scans.scan_factory import ScanFactory


def _add_run_options(parser: argparse.ArgumentParser, default) -> None:
    """Flags accepted before or after the subcommand name."""
    parser.add_argument("--threads", type=positive_int, default=default, help="worker threads (default: all cores)")
    parser.add_argument("--config", default=default, help="key-value config file (section.key = value)")
    parser.add_argument("--out", default=default, help="output file (default: standard output)")
    parser.add_argument("--seed", type=int, default=default, help="seed (overrides config and HECKELAB_SEED)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heckelab",
        description="Quaternion Hecke operators, spectral kernels, lattice counts and sup norms.",
    )
    parser.add_argument("--version", action="version", version=f"heckelab {__version__}")
    _add_run_options(parser, None)
    subparsers = parser.add_subparsers(dest="command", metavar="subcommand", required=True)
    for name in ScanFactory.available():
        scan_class = ScanFactory.scan_class(name)
        subparser = subparsers.add_parser(name, help=scan_class.help, description=scan_class.help)
        # SUPPRESS keeps values given before the subcommand name
        _add_run_options(subparser, argparse.SUPPRESS)
        scan_class.add_arguments(subparser)
    return parser


def _report_error(exc: BaseException, command: Optional[str]) -> None:
    """Write one JSON line describing the failure to standard error."""
    payload = {"error": type(exc).__name__, "message": str(exc), "subcommand": command}
    diagnostics = getattr(exc, "diagnostics", None)
    if diagnostics:
        payload["diagnostics"] = {key: repr(value) for key, value in diagnostics.items()}
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    sys.stderr.flush()


def dispatch(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand.

    Args:
        argv: Arguments without the program name (default sys.argv[1:]).

    Returns:
        Process exit code: 0 on success, 2 for usage errors, 1 for failed
        runs (a structured error is written to standard error).
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2

    LogService()
    logger = get_logger("HeckelabCLI")
    threading.current_thread().name = "MainThread"

    try:
        config = load_config_file(args.config)
        if args.seed is not None:
            config["runtime"]["seed"] = args.seed
        if args.threads is not None:
            config["runtime"]["threads"] = args.threads
        apply_config(config)

        connector = ScanConnector(config, ResultStore(), threads=args.threads)
        result = connector.run(args.command, args, args.out)
    except (HeckelabError, ValueError, ArithmeticError, OSError) as exc:
        logger.error("%s failed: %s", args.command, exc)
        _report_error(exc, args.command)
        return 1
    return result.exit_code


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
