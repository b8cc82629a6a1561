"""Command line front end.

Subcommands: ``inspect`` (market summary), ``minimize`` (one constrained
minimum price), ``ompd`` (the measure preserving construction as TSV),
``illustrate`` (discretization convergence tables), ``check`` (randomized
property suites).  The environment variable ``SD_ARB_MODE`` selects the
arithmetic: ``rational`` or ``float`` (default: follow the input).

Exit codes: 0 success, 1 bad input or unmet precondition, 2 solver
failure, 3 property violation.  Identical inputs, flags and seeds give
byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .arbitrage import (
    check_prop1,
    check_prop2,
    min_price,
    min_price_to_json,
    report_to_json,
    ssd_lower_bound,
)
from .discretize import (
    continuous_ompd,
    convergence_study,
    read_density_csv,
    tabulated_function,
)
from .errors import SdarbError, SolverError
from .measures import (
    is_adequate,
    is_kernel_monotone,
    market_price,
    read_market,
)
from .numeric import number_str
from .ompd import ompd, ompd_price
from .orders import OrderRelation
from .suites import SUITES, run_suite

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_SOLVER = 2
EXIT_PROPERTY = 3

_MODES = {"rational", "float"}


class UsageError(Exception):
    def __init__(self, message: str, prog: str):
        super().__init__(message)
        self.prog = prog


class _Parser(argparse.ArgumentParser):
    # bad usage is an input error (1), not a solver failure (2)
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message, self.prog)


def _mode() -> str:
    raw = os.environ.get("SD_ARB_MODE")
    if raw is None:
        return "auto"
    if raw not in _MODES:
        raise SdarbError(
            f"SD_ARB_MODE must be one of {sorted(_MODES)}, got {raw!r}"
        )
    return raw


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _bool(b: bool) -> str:
    return "true" if b else "false"


def cmd_inspect(args) -> int:
    m = read_market(args.market_file)
    lines = [
        "atoms: " + " ".join(number_str(x) for x in m.grid),
        "mu: " + " ".join(number_str(x) for x in m.mu),
        "nu: " + " ".join(number_str(x) for x in m.nu),
        "kernel: " + " ".join(number_str(x) for x in m.kernel),
        "kernel_monotone: " + _bool(is_kernel_monotone(m)),
        "adequate: " + _bool(is_adequate(m)),
        "market_price: " + number_str(market_price(m)),
        "lower_bound: " + number_str(ssd_lower_bound(m)),
    ]
    sys.stdout.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_minimize(args) -> int:
    m = read_market(args.market_file)
    res = min_price(m, OrderRelation.parse(args.order), mode=_mode())
    obj = min_price_to_json(res)
    obj["market_price"] = number_str(market_price(m))
    _emit(json.dumps(obj, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK if res.ok else EXIT_SOLVER


def cmd_ompd(args) -> int:
    m = read_market(args.market_file)
    theta = ompd(m)
    lines = ["# price: " + number_str(ompd_price(m))]
    for x, t in zip(m.grid, theta.values):
        lines.append(f"{number_str(x)}\t{number_str(t)}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _parse_int_list(raw: str) -> list:
    try:
        ns = [int(part) for part in raw.split(",") if part]
    except ValueError as exc:
        raise SdarbError(f"bad integer list {raw!r}: {exc}") from exc
    if not ns or any(n < 2 for n in ns):
        raise SdarbError(f"grid sizes must be integers >= 2, got {raw!r}")
    return ns


def _parse_interval(raw: str | None) -> tuple | None:
    if raw is None:
        return None
    parts = raw.split(",")
    if len(parts) != 2:
        raise SdarbError(f"interval must be LO,HI, got {raw!r}")
    lo, hi = float(parts[0]), float(parts[1])
    if not lo < hi:
        raise SdarbError(f"interval must increase, got {raw!r}")
    return (lo, hi)


def cmd_illustrate(args) -> int:
    table = read_density_csv(args.density_csv)
    kernel_table = read_density_csv(args.kernel_csv)
    kernel = tabulated_function(kernel_table)
    n_list = _parse_int_list(args.n_list)
    interval = _parse_interval(args.interval)
    records = convergence_study(table, kernel, n_list, interval)
    os.makedirs(args.out, exist_ok=True)
    theta = continuous_ompd(table, kernel)
    curve = ["# x\tlimit"]
    for x in table.grid:
        curve.append("%.17g\t%.17g" % (x, theta(float(x))))
    with open(os.path.join(args.out, "limit_curve.tsv"), "w") as fh:
        fh.write("\n".join(curve) + "\n")

    gaps = ["# n\trelation\tmin_price\tmarket_price\tsup_gap"]
    for rec in records:
        rows = ["# atom\tfsd\tssd\tlimit"]
        for x, a, b, c in zip(
            rec.market.grid, rec.fsd_payoff, rec.ssd_payoff, rec.limit_payoff
        ):
            rows.append("%.17g\t%.17g\t%.17g\t%.17g" % (x, a, b, c))
        path = os.path.join(args.out, f"minimizers_{rec.n}.tsv")
        with open(path, "w") as fh:
            fh.write("\n".join(rows) + "\n")
        for rel, mn, gap in (
            (OrderRelation.FIRST_ORDER, rec.fsd_price, rec.fsd_gap),
            (OrderRelation.SECOND_ORDER, rec.ssd_price, rec.ssd_gap),
        ):
            gaps.append(
                "%d\t%s\t%.17g\t%.17g\t%.17g"
                % (rec.n, rel.value, mn, rec.market_price, gap)
            )
    with open(os.path.join(args.out, "gaps.tsv"), "w") as fh:
        fh.write("\n".join(gaps) + "\n")
    return EXIT_OK


def cmd_check(args) -> int:
    if args.market is not None:
        if args.suite == "lemmas":
            raise SdarbError("the lemmas suite does not take a market file")
        m = read_market(args.market)
        check = check_prop1 if args.suite == "prop1" else check_prop2
        rep = check(m, mode=_mode())
        sys.stdout.write(
            json.dumps(report_to_json(rep), indent=2, sort_keys=True) + "\n"
        )
        ok = rep.consistent if args.suite == "prop1" else (
            rep.equivalent and rep.minima_agree
        )
        return EXIT_OK if ok else EXIT_PROPERTY
    res = run_suite(args.suite, args.trials, args.seed)
    lines = [
        f"suite: {res.name}",
        f"trials: {res.trials}",
        f"failures: {len(res.failures)}",
    ]
    for key in sorted(res.detail):
        lines.append(f"{key}: {res.detail[key]}")
    lines.append("result: " + ("PASS" if res.passed else "FAIL"))
    sys.stdout.write("\n".join(lines) + "\n")
    for failure in res.failures:
        sys.stdout.write(json.dumps(failure, sort_keys=True) + "\n")
    return EXIT_OK if res.passed else EXIT_PROPERTY


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="sdarb", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("inspect", help="print a market summary")
    q.add_argument("market_file")
    q.set_defaults(func=cmd_inspect)

    q = sub.add_parser("minimize", help="minimum price under one order")
    q.add_argument("market_file")
    q.add_argument(
        "--order", required=True, choices=[r.value for r in OrderRelation]
    )
    q.add_argument("--out", default=None, help="report path (default stdout)")
    q.set_defaults(func=cmd_minimize)

    q = sub.add_parser("ompd", help="measure preserving construction as TSV")
    q.add_argument("market_file")
    q.add_argument("--out", default=None, help="TSV path (default stdout)")
    q.set_defaults(func=cmd_ompd)

    q = sub.add_parser("illustrate", help="discretization convergence tables")
    q.add_argument("density_csv")
    q.add_argument("kernel_csv")
    q.add_argument("--n-list", default="5,20,80")
    q.add_argument("--interval", default=None, help="LO,HI mass window")
    q.add_argument("--out", required=True, help="output directory")
    q.set_defaults(func=cmd_illustrate)

    q = sub.add_parser("check", help="randomized property suites")
    q.add_argument("--suite", required=True, choices=sorted(SUITES))
    q.add_argument("--trials", type=int, default=None)
    q.add_argument("--seed", type=int, default=None)
    q.add_argument(
        "--market", default=None, help="check one market instead of a random suite"
    )
    q.set_defaults(func=cmd_check)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"{exc.prog}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except json.JSONDecodeError as exc:
        print(
            f"error: bad JSON at line {exc.lineno} column {exc.colno}: {exc.msg}",
            file=sys.stderr,
        )
        return EXIT_INPUT
    except SolverError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except SdarbError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
