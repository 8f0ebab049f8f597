"""Command-line front end.

    dhoa analyze --config run.json [--family power --sigma 0 --alpha 1 --beta 4 ...]
    dhoa reproduce-paper [--out DIR]

Exit codes: 0 success, 1 verification failure or rejection, 2 bad
configuration, 3 numerical failure. ``DHOA_THREADS`` caps the number of
worker threads used by ``reproduce-paper``.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .reports import (
    EXIT_CONFIG,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_VERIFICATION,
    ConfigError,
    dumps,
    exit_code,
    load_config,
    run_analyze,
    write_csv_tables,
    write_report,
)
from .reproduce import run_reproduce_paper


class _Parser(argparse.ArgumentParser):
    """Argument errors exit with the configuration-error code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dhoa", description="Deformed oscillator algebras from Bargmann weights.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    an = sub.add_parser("analyze", help="run the full pipeline for one weight")
    an.add_argument("--config", help="JSON run configuration; flags below override it")
    an.add_argument("--family", choices=["power", "power_beta", "stretched_exp", "log_gaussian",
                                         "essential_edge", "tabulated"])
    an.add_argument("--sigma", type=float)
    an.add_argument("--eta", type=float)
    an.add_argument("--k", type=int)
    an.add_argument("--m", type=int)
    an.add_argument("--n", type=int)
    an.add_argument("--alpha", type=float)
    an.add_argument("--beta", type=float)
    an.add_argument("--path", help="two-column CSV for a tabulated weight")
    an.add_argument("--mode", choices=["annihilation", "creation"])
    an.add_argument("--mu", type=float)
    an.add_argument("--method", choices=["auto", "closed-form", "quadrature"])
    an.add_argument("--nmax", type=int, dest="n_max")
    an.add_argument("--seed", type=int)
    an.add_argument("--out", help="write the JSON report here instead of stdout")
    an.add_argument("--csv-dir", dest="csv_dir", help="also write CSV tables into this directory")

    rp = sub.add_parser("reproduce-paper", help="run the fixed battery of worked examples")
    rp.add_argument("--out", help="directory for suite.json and one report per analysis")
    rp.add_argument("--threads", type=int, help="worker threads (default: $DHOA_THREADS or 1)")
    return parser


def _analyze(args) -> int:
    overrides = {k: getattr(args, k) for k in ("family", "sigma", "eta", "k", "m", "n", "alpha", "beta",
                                               "path", "mode", "mu", "method", "n_max", "seed",
                                               "out", "csv_dir")}
    try:
        config = load_config(args.config, overrides)
        report = run_analyze(config)
    except ConfigError as exc:
        print(f"dhoa analyze: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if config.out:
        write_report(report, config.out)
    else:
        print(dumps(report))
    if config.csv_dir:
        write_csv_tables(report, config.csv_dir)
    code = exit_code(report)
    print(f"verdict: {report.get('verdict')}  status: {report['status']}  exit: {code}", file=sys.stderr)
    return code


def _reproduce(args) -> int:
    suite = run_reproduce_paper(args.threads)
    if args.out:
        out = Path(args.out)
        write_report(suite, out / "suite.json")
        for ex in suite["examples"]:
            for i, rep in enumerate(ex["analyses"]):
                write_report(rep, out / f"{ex['id']}-{i}.json")
    else:
        print(dumps(suite))
    for ex in suite["examples"]:
        print(f"{ex['status']:>17}  {ex['id']}", file=sys.stderr)
    if suite["status"] == "numerical-failure":
        return EXIT_NUMERICAL
    return EXIT_OK if suite["status"] == "pass" else EXIT_VERIFICATION


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "analyze":
        return _analyze(args)
    return _reproduce(args)


if __name__ == "__main__":
    sys.exit(main())
