#!/usr/bin/env python3
"""Run the randomized property suites, one JSON report per line.

Exit code 1 if any suite finds a violation.
"""

import argparse
import json
import sys

from sdarb.suites import SUITES, run_suite


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument(
        "--suite", choices=sorted(SUITES), action="append",
        help="repeatable; default: all suites",
    )
    ap.add_argument("--trials", type=int, default=None)
    ap.add_argument("--seed", type=int, default=None)
    args = ap.parse_args(argv)

    ok = True
    for name in args.suite or sorted(SUITES):
        res = run_suite(name, args.trials, args.seed)
        print(json.dumps(res.to_json(), sort_keys=True))
        ok = ok and res.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
