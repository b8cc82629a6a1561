"""Rearrangement inequalities for step functions on [0, 1].

The central quantity is ``int_0^1 q1(u) * q2(1-u) du`` for two quantile
functions: the expectation of a product when one factor is arranged
against the other (anti-assembly).  With both factors aligned the same
way the integral is maximal; anti-aligned it is minimal (the classic
rearrangement bounds for products of random variables with prescribed
marginals).

Integrals are evaluated by splitting [0, 1] at every breakpoint of every
factor and sampling each resulting cell at its midpoint.  Both factors
are constant on the open cell, so the midpoint value is exact and no
left/right continuity convention can leak in.  In exact mode the result
is an exact rational.
"""

from __future__ import annotations

from typing import Sequence, Union

from .errors import GNotMonotone, LengthMismatch
from .measures import (
    MarketModel,
    StepFunction,
    payoff_values,
    pushforward,
    quantile,
)
from .numeric import EPS_COMPARE, Rat, all_exact, geq, leq

__all__ = [
    "quantile_product_integral",
    "hardy_littlewood_bounds",
    "is_comonotone",
    "is_countermonotone",
    "hardy_majorization_holds",
]


def _sf_exact(q: StepFunction) -> bool:
    return all_exact(q.breakpoints) and all_exact(q.values)


def _refinement(functions: Sequence[StepFunction], reversed_flags) -> list:
    """Sorted cell boundaries in [0, 1]: 0, 1 and every (possibly mirrored)
    breakpoint of every factor."""
    exact = all(_sf_exact(q) for q in functions)
    one = Rat(1) if exact else 1.0
    pts = {0 * one, one}
    for q, rev in zip(functions, reversed_flags):
        for b in q.breakpoints:
            t = one - b if rev else b
            if 0 < t < 1:
                pts.add(t)
    return sorted(pts)


def quantile_product_integral(
    q1: StepFunction, q2: StepFunction, reverse_second: bool = True
):
    """``int_0^1 q1(u) q2(1-u) du`` (or ``q2(u)`` with ``reverse_second=False``)."""
    exact = _sf_exact(q1) and _sf_exact(q2)
    half = Rat(1, 2) if exact else 0.5
    one = Rat(1) if exact else 1.0
    cells = _refinement((q1, q2), (False, reverse_second))
    total = 0
    for a, b in zip(cells, cells[1:]):
        mid = (a + b) * half
        u2 = one - mid if reverse_second else mid
        total = total + q1(mid) * q2(u2) * (b - a)
    return total


def hardy_littlewood_bounds(m: MarketModel, f, g) -> tuple:
    """Rearrangement bounds for ``E_mu[f(X) g(X)]``.

    Returns ``(lower, upper)`` where lower anti-aligns the marginal
    quantiles and upper aligns them.  The realized expectation always
    lies in between, with equality iff the payoffs are counter- resp.
    comonotone under ``mu``.
    """
    qf = quantile(pushforward(m, f))
    qg = quantile(pushforward(m, g))
    lower = quantile_product_integral(qf, qg, reverse_second=True)
    upper = quantile_product_integral(qf, qg, reverse_second=False)
    return lower, upper


def _pair_products(m: MarketModel, f, g):
    fv = payoff_values(m, f)
    gv = payoff_values(m, g)
    n = len(fv)
    for i in range(n):
        for j in range(i + 1, n):
            yield (fv[i] - fv[j]) * (gv[i] - gv[j])


def is_comonotone(m: MarketModel, f, g, eps: float = EPS_COMPARE) -> bool:
    """All support pairs move together: ``(f_i - f_j)(g_i - g_j) >= 0``."""
    return all(geq(p, 0, m.exact, eps) for p in _pair_products(m, f, g))


def is_countermonotone(m: MarketModel, f, g, eps: float = EPS_COMPARE) -> bool:
    """All support pairs move oppositely: ``(f_i - f_j)(g_i - g_j) <= 0``."""
    return all(leq(p, 0, m.exact, eps) for p in _pair_products(m, f, g))


def hardy_majorization_holds(
    q1: StepFunction, q2: StepFunction, g: StepFunction, eps: float = EPS_COMPARE
) -> bool:
    """Weighted majorization: ``int_0^v q1 g >= int_0^v q2 g`` for all v in [0,1].

    ``g`` must be nonincreasing on [0, 1].  Both partial integrals are
    piecewise linear in ``v`` with kinks only at breakpoints of the
    integrands, so checking at every refinement point decides the
    property.
    """
    for a, b in zip(g.values, g.values[1:]):
        if a < b:
            raise GNotMonotone(f"weight function increases: {a} -> {b}")
    exact = _sf_exact(q1) and _sf_exact(q2) and _sf_exact(g)
    half = Rat(1, 2) if exact else 0.5
    cells = _refinement((q1, q2, g), (False, False, False))
    acc1 = acc2 = 0
    for a, b in zip(cells, cells[1:]):
        mid = (a + b) * half
        w = g(mid) * (b - a)
        acc1 = acc1 + q1(mid) * w
        acc2 = acc2 + q2(mid) * w
        if not geq(acc1, acc2, exact, eps):
            return False
    return True
