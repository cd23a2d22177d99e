"""Command-line entry point."""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import __version__
from .pipeline import analyze_paths
from .report import exit_code, render_json, render_registry, render_table
from .rules import ConfigError, Severity, load_config, parse_ids
from .rules.config import parse_version
from .sim import SimError, Variant, mwa, run_scenario, scenario_names
from .sim.trace import render_json as sim_json
from .sim.trace import render_ordering_json, render_ordering_text, render_text


class _ArgError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # raise instead of exiting so main() can map every usage error to exit code 2
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _ArgError(f"{self.prog}: error: {message}")


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ercaudit", description="ERC-20 security analyzer and attack simulator")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    a = sub.add_parser("analyze", help="run the checks over Solidity files")
    a.add_argument("paths", nargs="+")
    a.add_argument("--format", choices=("table", "json"), default="table")
    a.add_argument("--min-severity", choices=("informational", "low", "medium", "high"))
    a.add_argument("--enable", help="comma-separated ids or ranges, e.g. 1-37,45")
    a.add_argument("--disable", help="comma-separated ids or ranges")
    a.add_argument("--pragma-min", help="oldest acceptable compiler version, e.g. 0.5.11")
    a.add_argument("--config", help="key = value configuration file")

    c = sub.add_parser("checks", help="inspect the check catalogue")
    csub = c.add_subparsers(dest="checks_command", required=True, parser_class=_Parser)
    cl = csub.add_parser("list", help="print all checks")
    cl.add_argument("--format", choices=("table", "json"), default="table")

    s = sub.add_parser("sim", help="run the token simulator")
    ssub = s.add_subparsers(dest="sim_command", required=True, parser_class=_Parser)
    run = ssub.add_parser("run", help="run a canned attack scenario")
    run.add_argument("scenario", choices=scenario_names())
    run.add_argument("--variant", choices=("secure", "insecure"), default="secure")
    run.add_argument("--trace", action="store_true", help="include every trace event")
    run.add_argument("--format", choices=("text", "json"), default="text")
    m = ssub.add_parser("mwa", help="worst case over approve/transferFrom interleavings")
    m.add_argument("--n", type=int, default=100)
    m.add_argument("--m", type=int, default=50)
    m.add_argument("--variant", choices=("secure", "insecure"), default="secure")
    m.add_argument("--format", choices=("text", "json"), default="text")
    return p


def _analyze(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    overrides: dict = {}
    if args.min_severity:
        overrides["min_severity"] = Severity.parse(args.min_severity)
    if args.enable:
        overrides["enable"] = frozenset(parse_ids(args.enable))
    if args.disable:
        overrides["disable"] = frozenset(parse_ids(args.disable))
    if args.pragma_min:
        overrides["pragma_min"] = parse_version(args.pragma_min)
    config = config.merged(**overrides)
    try:
        report = analyze_paths(args.paths, config)
    except OSError as exc:
        print(f"ercaudit: cannot read {exc.filename}: {exc.strerror}", file=sys.stderr)
        return 2
    if args.format == "json":
        sys.stdout.write(render_json(report.findings, report.selection, report.files,
                                     report.diagnostics).decode("ascii"))
    else:
        sys.stdout.write(render_table(report.findings, report.selection, report.diagnostics))
    for d in report.diagnostics:
        print(str(d), file=sys.stderr)
    return exit_code(report.findings, config.min_severity, report.diagnostics)


def _sim(args: argparse.Namespace) -> int:
    variant = Variant.parse(args.variant)
    if args.sim_command == "run":
        outcome = run_scenario(args.scenario, variant)
        render = sim_json if args.format == "json" else render_text
        sys.stdout.write(render(outcome, trace=args.trace))
        return 1 if variant is Variant.SECURE and not outcome.safe else 0
    if args.n < 0 or args.m < 0:
        raise _ArgError("ercaudit sim mwa: error: --n and --m must be non-negative")
    res = mwa(args.n, args.m, variant)
    render = render_ordering_json if args.format == "json" else render_ordering_text
    sys.stdout.write(render(res))
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = _parser().parse_args(argv)
        if args.command == "analyze":
            return _analyze(args)
        if args.command == "checks":
            sys.stdout.write(render_registry(args.format))
            return 0
        return _sim(args)
    except _ArgError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"ercaudit: {exc}", file=sys.stderr)
        return 2
    except SimError as exc:
        print(f"ercaudit: simulation error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
