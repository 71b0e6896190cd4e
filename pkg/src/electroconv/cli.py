"""Command-line entry point.

    electroconv run <config.json> [--out DIR]
    electroconv scenario <name|all> --out DIR
    electroconv fit <series.csv> --column COL --window A,B
    electroconv check <suite|all> --seed S [--n N] [--half-period L] [--trials K]
    electroconv accept DIR
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import acceptance, checks, diagnostics, files, pipeline
from . import spectral as sp
from .config import ConfigError, parse_config

log = logging.getLogger("electroconv")


def _window(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected A,B got {text!r}") from None
    return a, b


def _status_code(summary: dict) -> int:
    return acceptance.EXIT_BLOWUP if summary.get("status") == "blowup" else 0


def cmd_run(args: argparse.Namespace) -> int:
    try:
        cfg = parse_config(Path(args.config).read_text())
    except ConfigError as exc:
        print(f"config error at {exc.key or '<root>'}: {exc.message}", file=sys.stderr)
        return 2
    summary = pipeline.run_experiment(cfg, args.out)
    print(json.dumps({k: summary.get(k) for k in ("status", "message", "steps", "passed") if k in summary}))
    return _status_code(summary)


def cmd_scenario(args: argparse.Namespace) -> int:
    names = list(pipeline.SCENARIOS) if args.name == "all" else [args.name]
    code = 0
    for name in names:
        try:
            summary = pipeline.run_scenario(name, args.out)
        except ValueError as exc:
            print(str(exc), file=sys.stderr)
            return 2
        log.info("%s: %s", name, summary.get("status"))
        code = max(code, _status_code(summary))
    return code


def cmd_fit(args: argparse.Namespace) -> int:
    cols = files.read_series(args.csv)
    if args.column not in cols:
        print(f"unknown column {args.column!r}", file=sys.stderr)
        return 2
    try:
        fit = diagnostics.fit_exponent(cols["t"], cols[args.column], args.window)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    print(json.dumps({
        "column": args.column, "slope": fit.slope, "intercept": fit.intercept,
        "window": list(fit.window), "n_samples": fit.n_samples, "rms_residual": fit.rms_residual,
    }))
    return 0


def cmd_check(args: argparse.Namespace) -> int:
    if args.suite != "all" and args.suite not in checks.SUITES:
        print(f"unknown suite {args.suite!r}; expected one of {['all', *checks.SUITES]}", file=sys.stderr)
        return 2
    grid = sp.make_grid(args.n, args.half_period)
    reports = checks.run_suite(args.suite, grid, args.seed, args.trials)
    print(json.dumps([r.to_dict() for r in reports], indent=2, default=files._jsonable))
    return 0 if all(r.passed for r in reports) else 1


def cmd_accept(args: argparse.Namespace) -> int:
    report, code = acceptance.evaluate(args.dir)
    files.write_json(report, Path(args.dir) / acceptance.REPORT_FILE)
    for entry in report["criteria"]:
        print(acceptance.format_line(entry))
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="electroconv", description=__doc__.split("\n")[0] or None)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one JSON configuration")
    r.add_argument("config")
    r.add_argument("--out", default=None, help="output directory (default: output.dir)")
    r.set_defaults(func=cmd_run)

    s = sub.add_parser("scenario", help="run a named preset into OUT/<name>")
    s.add_argument("name")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_scenario)

    f = sub.add_parser("fit", help="decay exponent of one CSV column")
    f.add_argument("csv")
    f.add_argument("--column", required=True)
    f.add_argument("--window", required=True, type=_window)
    f.set_defaults(func=cmd_fit)

    c = sub.add_parser("check", help="run a property suite")
    c.add_argument("suite")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--n", type=int, default=256)
    c.add_argument("--half-period", type=float, default=8 * math.pi)
    c.add_argument("--trials", type=int, default=None)
    c.set_defaults(func=cmd_check)

    a = sub.add_parser("accept", help="grade scenario outputs in DIR")
    a.add_argument("dir")
    a.set_defaults(func=cmd_accept)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
