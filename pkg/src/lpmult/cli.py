"""The `lpmult` command line.

    lpmult [--config PATH] [--out PATH] [--format csv|json] [--workers N] [--seed N] [-v]
           {verify SUITE, sweep, norm}

Exit codes are 0 on success, 1 when a verification suite fails and 2 for usage or
configuration errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Tuple

from lpmult import Workbench, __version__
from lpmult.config import COMMANDS, FORMATS, RunConfig, load_config
from lpmult.exceptions import ConfigError, GridMismatchError, ParameterError, WeightError
from lpmult.multiplier.sweep import operator_norm_sweep
from lpmult.verify import run_suite

_logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

_LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="lpmult",
        description="Littlewood-Paley norms, paraproducts and half-space multiplier sweeps on periodic grids.",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("--config", type=Path, default=None, help="INI run configuration (default: built-in defaults).")
    ap.add_argument("--out", type=Path, default=None, help="Output file (default: standard output).")
    ap.add_argument(
        "--format",
        choices=FORMATS,
        default=None,
        help="Report format (default: from config, else CSV for sweeps and a text table for norm).",
    )
    ap.add_argument("--workers", type=int, default=None, help="Worker processes for sweeps.")
    ap.add_argument("--seed", type=int, default=None, help="Seed for random test functions.")
    ap.add_argument("-v", "--verbose", action="count", default=0, help="Repeat for more logging.")
    sub = ap.add_subparsers(dest="command", metavar="COMMAND")
    verify = sub.add_parser("verify", help="Run an invariant suite.")
    verify.add_argument("suite", help="grid, dyadic, norms, paraproduct, maximal, embeddings or all")
    sub.add_parser("sweep", help="Estimate multiplier norms over the configured parameter grid.")
    sub.add_parser("norm", help="Tabulate the norms of one test function.")
    return ap


def _emit(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    # Newlines are written untranslated so reports are byte-identical across platforms.
    with out.open("w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    _logger.info(f"Wrote {out}")


def cmd_verify(config: RunConfig, suite: str) -> int:
    failures = run_suite(suite, config.seed, config.L)
    _emit(json.dumps([failure.to_dict() for failure in failures], indent=2) + "\n", config.out)
    return EXIT_FAILED if failures else EXIT_OK


def cmd_sweep(config: RunConfig) -> int:
    report = operator_norm_sweep(config.sweep_config())
    _emit(report.to_json() if config.format == "json" else report.to_csv(), config.out)
    return EXIT_OK


def norm_rows(config: RunConfig) -> List[Tuple[str, float, float, float, float]]:
    """(space, s, p, γ, norm) for the configured field at the first N and parameter values."""
    wb = Workbench.create(config.d, config.L, config.Ns[0], config.K)
    f = wb.sample(config.norm_field, config.norm_params, config.seed)
    s, p, gamma = config.s_values[0], config.p_values[0], config.gamma_values[0]
    return [
        (token, s, p, gamma, value)
        for token, value in wb.norm_table(f, list(config.norm_spaces), s, p, gamma)
    ]


def format_norm_table(rows: List[Tuple[str, float, float, float, float]], fmt: Optional[str]) -> str:
    header = ("space", "s", "p", "gamma", "norm")
    match fmt:
        case "csv":
            buffer = io.StringIO()
            writer = csv.writer(buffer, lineterminator="\n")
            writer.writerow(header)
            writer.writerows([(token, repr(s), repr(p), repr(g), repr(v)) for token, s, p, g, v in rows])
            return buffer.getvalue()
        case "json":
            records = [dict(zip(header, row)) for row in rows]
            return json.dumps(records, indent=2) + "\n"
        case _:
            width = max([len(header[0])] + [len(row[0]) for row in rows])
            lines = [f"{header[0]:<{width}}  {'s':>8}  {'p':>8}  {'gamma':>8}  {'norm':>22}"]
            for token, s, p, g, v in rows:
                lines.append(f"{token:<{width}}  {s:>8g}  {p:>8g}  {g:>8g}  {v:>22.15g}")
            return "\n".join(lines) + "\n"


def cmd_norm(config: RunConfig) -> int:
    _emit(format_norm_table(norm_rows(config), config.format), config.out)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    level = _LOG_LEVELS[min(args.verbose, len(_LOG_LEVELS) - 1)]
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        config = RunConfig() if args.config is None else load_config(args.config)
        config = config.with_overrides(args.out, args.format, args.workers, args.seed)
        command = args.command or config.command
        if command not in COMMANDS:
            ap.print_usage(sys.stderr)
            print("lpmult: error: no command given on the command line or in [run] command", file=sys.stderr)
            return EXIT_USAGE
        match command:
            case "verify":
                return cmd_verify(config, args.suite if args.command else config.suite)
            case "sweep":
                return cmd_sweep(config)
            case _:
                return cmd_norm(config)
    except (ConfigError, ParameterError, WeightError, GridMismatchError) as error:
        print(f"lpmult: error: {error}", file=sys.stderr)
        return EXIT_USAGE
