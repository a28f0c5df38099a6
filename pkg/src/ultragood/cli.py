"""Command-line entry point.

Usage examples::

    ultragood verify taylor --d 2 --deg 4 --n 500 --seed 7
    ultragood verify mainp --curve veronese --p 5 --l 2 --samples 1000 --out mainp.json
    ultragood ifs dim --file cantor3.json
    ultragood report show mainp.json

Exit codes: 0 all pass, 1 violations, 2 configuration or precondition
error, 3 certification cap reached.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import __version__
from .norms import CertificationError
from .padic import PreconditionError
from .report import SuiteConfig, load, summary_lines, write
from .suites import run_suite

EXIT_OK, EXIT_VIOLATION, EXIT_CONFIG, EXIT_UNCERTIFIED = 0, 1, 2, 3

GROUPS = {
    "verify": ["taylor", "diffquot", "lemn", "lem2", "lem3", "polymax", "good", "mainp"],
    "ifs": ["check", "dim", "measure"],
    "measure": ["decay", "federer"],
    "constants": ["extract"],
}

# flag defaults per suite when neither flags nor a config file set them
DEFAULTS = {
    "verify taylor": {"d": [1, 2, 3], "l": [4], "n": 500},
    "verify diffquot": {"d": [1, 2, 3], "l": [4], "n": 500},
    "verify lemn": {"p": [2, 3, 5], "d": [1, 2], "l": [3], "n": 200},
    "verify lem2": {"p": [3, 5], "d": [1, 2], "l": [2], "n": 50},
    "verify lem3": {"p": [2, 3, 5], "d": [1, 2], "l": [1, 2, 3], "n": 20},
    "verify polymax": {"p": [2, 3, 5], "d": [1, 2], "l": [1, 2, 3], "n": 100},
    "constants extract": {"p": [2, 3, 5], "d": [1, 2], "l": [1, 2, 3], "n": 20},
    "verify good": {"p": [2, 3, 5], "d": [1, 2], "l": [3], "n": 30},
    "verify mainp": {"p": [5], "d": [1], "l": [2], "n": 1000, "curve": "veronese"},
    "measure decay": {"p": [3], "d": [1], "n": 30},
    "measure federer": {"p": [3], "d": [1], "n": 20},
}


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _eps_grid(text: str):
    if text == "auto":
        return "auto"
    try:
        return [str(Fraction(v)) for v in text.split(",") if v.strip()]
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"bad eps grid {text!r}") from exc


def add_suite_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--p", type=_int_list, help="prime(s), comma separated")
    sp.add_argument("--d", type=_int_list, help="dimension(s)")
    sp.add_argument("--deg", "--l", dest="l", type=_int_list, help="degree / Taylor order")
    sp.add_argument("--n", "--samples", dest="n", type=int, help="corpus size")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--eps-grid", type=_eps_grid, help="comma-separated rationals or 'auto'")
    sp.add_argument("--max-res", type=int, help="resolution cap (radius exponent)")
    sp.add_argument("--config", type=Path, help="JSON suite configuration")
    sp.add_argument("--out", type=Path, help="write the report here")
    sp.add_argument("--format", choices=["json", "csv"], default="json")
    sp.add_argument("--curve", help="named curve (veronese, cubic)")
    sp.add_argument("--file", help="input file (IFS model, curve or polynomial list)")
    sp.add_argument("--measure", choices=["haar", "cantor", "full"], help="built-in measure")
    sp.add_argument("--max-t", type=int, help="deepest radius exponent for ball sweeps")
    sp.add_argument("--compare-haar", action="store_true", help="ifs measure: require equality with Haar")
    sp.add_argument("--expect-d", type=float, help="measure federer: expected D")
    sp.add_argument("--timing", action="store_true", help="record wall time (breaks byte-identical reports)")
    sp.add_argument("--quiet", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ultragood", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    groups = parser.add_subparsers(dest="group", required=True)
    for group, names in GROUPS.items():
        gp = groups.add_parser(group)
        subs = gp.add_subparsers(dest="command", required=True)
        for name in names:
            add_suite_flags(subs.add_parser(name))
    rp = groups.add_parser("report")
    rsubs = rp.add_subparsers(dest="command", required=True)
    show = rsubs.add_parser("show")
    show.add_argument("path", type=Path)
    return parser


def make_config(args: argparse.Namespace) -> SuiteConfig:
    suite = f"{args.group} {args.command}"
    data: dict = {"suite": suite}
    data.update(DEFAULTS.get(suite, {}))
    if args.config:
        try:
            loaded = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise PreconditionError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise PreconditionError("config must be a JSON object")
        loaded.setdefault("suite", suite)
        if loaded["suite"] != suite:
            raise PreconditionError(f"config is for {loaded['suite']!r}, not {suite!r}")
        data.update(loaded)
    for key in ("p", "d", "l", "n", "seed", "eps_grid", "max_res", "curve", "file"):
        val = getattr(args, key)
        if val is not None:
            data[key] = val
    options = dict(data.get("options", {}))
    if args.max_t is not None:
        options["max_t"] = args.max_t
    if args.compare_haar:
        options["compare_haar"] = True
    if args.expect_d is not None:
        options["expect_D"] = args.expect_d
    data["options"] = options
    if args.measure:
        data["measure"] = {"kind": args.measure}
    try:
        return SuiteConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise PreconditionError(str(exc)) from exc


def exit_code(report: dict) -> int:
    if report.get("violations"):
        return EXIT_VIOLATION
    if report.get("status") == "uncertified":
        return EXIT_UNCERTIFIED
    return EXIT_OK


def cmd_report_show(path: Path) -> int:
    try:
        report = load(path)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print("\n".join(summary_lines(report)))
    return exit_code(report)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.group == "report":
        return cmd_report_show(args.path)
    try:
        config = make_config(args)
        start = time.perf_counter()
        report = run_suite(config)
        if args.timing:
            report["wall_time_s"] = round(time.perf_counter() - start, 3)
    except CertificationError as exc:
        print(f"certification cap reached: {exc}", file=sys.stderr)
        return EXIT_UNCERTIFIED
    except (PreconditionError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.out:
        write(report, args.out, args.format)
    if config.suite == "ifs dim":
        print(report["summary"]["sim_dim"])
    elif not args.quiet:
        print("\n".join(summary_lines(report)))
    return exit_code(report)


def run(argv: list[str] | None = None) -> int:
    """``cli_run``: same as :func:`main` but never raises ``SystemExit`` on bad flags."""
    try:
        return main(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
