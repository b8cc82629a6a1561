#!/usr/bin/env python3
"""Walk the two built-in two-atom markets end to end.

Both have a non-monotone pricing kernel; the first admits a first-order
improvement of the identity payoff, the second only a second-order one.
"""

import sys

from sdarb import (
    OrderRelation,
    has_stochastic_arbitrage,
    market_price,
    min_price,
    new_market,
    ompd,
    ompd_price,
    ssd_lower_bound,
)
from sdarb.numeric import Rat, number_str


def describe(name, m) -> None:
    print(f"[{name}]")
    print("  kernel:", " ".join(number_str(k) for k in m.kernel))
    print("  market_price:", number_str(market_price(m)))
    theta = ompd(m)
    print(
        "  construction:",
        " ".join(number_str(t) for t in theta.values),
        "  price:", number_str(ompd_price(m)),
    )
    print("  ssd_lower_bound:", number_str(ssd_lower_bound(m)))
    for rel in OrderRelation:
        res = min_price(m, rel)
        flag = "arbitrage" if has_stochastic_arbitrage(m, rel) else "none"
        print(
            f"  min[{rel.value}]: {number_str(res.value)}  payoff:",
            " ".join(number_str(t) for t in res.payoff.values),
            f" ({flag})",
        )


def main() -> int:
    describe("first-order improvable", new_market(
        [1, 2], [Rat(2, 3), Rat(1, 3)], [Rat(1, 3), Rat(2, 3)]))
    describe("second-order improvable only", new_market(
        [1, 2], [Rat(1, 3), Rat(2, 3)], [Rat(1, 5), Rat(4, 5)]))
    return 0


if __name__ == "__main__":
    sys.exit(main())
