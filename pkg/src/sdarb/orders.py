"""Stochastic order relations between finitely supported distributions.

For distributions ``Y1``, ``Y2`` with CDFs ``F1``, ``F2`` and quantile
functions ``Q1``, ``Q2``:

* equal in distribution: identical atom/mass lists;
* first-order dominance (``Y1 >=_1 Y2``): ``F1 <= F2`` pointwise;
* second-order dominance (``Y1 >=_2 Y2``), three equivalent criteria:
  - partial CDF integrals: ``int_{-inf}^y F1 <= int_{-inf}^y F2`` for all y,
  - partial quantile integrals: ``int_0^v Q1 >= int_0^v Q2`` for all v in [0,1],
  - expected shortfall: ``E[(t - Y1)_+] <= E[(t - Y2)_+]`` for all t;
* concave order (``Y1 >=_cv Y2``): equal means plus second-order dominance.

All comparands are piecewise linear with kinks only at atoms (resp. at
cumulative mass levels), so checking at those finitely many points plus
the constant tails decides the relation exactly.
"""

from __future__ import annotations

from enum import Enum

from .errors import UnknownMethod
from .measures import DiscreteMeasure, cdf, quantile
from .numeric import EPS_COMPARE, approx_eq, geq, leq

__all__ = [
    "OrderRelation",
    "same_distribution",
    "dominates_fsd",
    "dominates_ssd",
    "dominates_cv",
    "dominates",
    "expected_shortfall",
    "SSD_METHODS",
]

SSD_METHODS = ("cdf_integral", "quantile_integral", "shortfall")


class OrderRelation(Enum):
    """The four payoff-comparison relations the minimizers support."""

    EQUAL = "eq"
    FIRST_ORDER = "fsd"
    CONCAVE = "cv"
    SECOND_ORDER = "ssd"

    @classmethod
    def parse(cls, token: str) -> "OrderRelation":
        for member in cls:
            if member.value == token or member.name.lower() == token.lower():
                return member
        raise UnknownMethod(f"unknown relation {token!r}")


def _joint_exact(d1: DiscreteMeasure, d2: DiscreteMeasure) -> bool:
    return d1.exact and d2.exact


def same_distribution(
    d1: DiscreteMeasure, d2: DiscreteMeasure, eps: float = EPS_COMPARE
) -> bool:
    """Equality in distribution (atom lists and mass lists agree)."""
    if len(d1.atoms) != len(d2.atoms):
        return False
    exact = _joint_exact(d1, d2)
    return all(
        approx_eq(a, b, exact, eps) for a, b in zip(d1.atoms, d2.atoms)
    ) and all(approx_eq(p, q, exact, eps) for p, q in zip(d1.masses, d2.masses))


def _support_union(d1: DiscreteMeasure, d2: DiscreteMeasure) -> list:
    return sorted(set(d1.atoms) | set(d2.atoms))


def dominates_fsd(d1: DiscreteMeasure, d2: DiscreteMeasure) -> bool:
    """First-order dominance: F1(x) <= F2(x) everywhere."""
    exact = _joint_exact(d1, d2)
    f1, f2 = cdf(d1), cdf(d2)
    return all(leq(f1(x), f2(x), exact) for x in _support_union(d1, d2))


def expected_shortfall(d: DiscreteMeasure, t):
    """``E[(t - Y)_+]`` for ``Y ~ d``."""
    total = 0
    for a, m in zip(d.atoms, d.masses):
        if a < t:
            total = total + m * (t - a)
    return total


def _ssd_by_cdf_integral(d1, d2, exact) -> bool:
    xs = _support_union(d1, d2)
    f1, f2 = cdf(d1), cdf(d2)
    acc1 = acc2 = 0
    prev = xs[0]
    if not leq(acc1, acc2, exact):  # pragma: no cover - both start at zero
        return False
    for x in xs[1:]:
        # CDFs are constant on (prev, x), equal to their value at prev
        acc1 = acc1 + f1(prev) * (x - prev)
        acc2 = acc2 + f2(prev) * (x - prev)
        if not leq(acc1, acc2, exact):
            return False
        prev = x
    return True


def _cumulative_levels(d: DiscreteMeasure) -> list:
    acc = 0
    out = []
    for m in d.masses:
        acc = acc + m
        out.append(acc)
    return out


def _ssd_by_quantile_integral(d1, d2, exact) -> bool:
    q1, q2 = quantile(d1), quantile(d2)
    levels = sorted(set(_cumulative_levels(d1)) | set(_cumulative_levels(d2)))
    acc1 = acc2 = 0
    prev = 0
    for u in levels:
        # quantiles are constant on (prev, u], equal to their value at u
        acc1 = acc1 + q1(u) * (u - prev)
        acc2 = acc2 + q2(u) * (u - prev)
        if not geq(acc1, acc2, exact):
            return False
        prev = u
    return True


def _ssd_by_shortfall(d1, d2, exact) -> bool:
    return all(
        leq(expected_shortfall(d1, t), expected_shortfall(d2, t), exact)
        for t in _support_union(d1, d2)
    )


def dominates_ssd(
    d1: DiscreteMeasure, d2: DiscreteMeasure, method: str = "cdf_integral"
) -> bool:
    """Second-order dominance via one of the three equivalent criteria."""
    exact = _joint_exact(d1, d2)
    if method == "cdf_integral":
        return _ssd_by_cdf_integral(d1, d2, exact)
    if method == "quantile_integral":
        return _ssd_by_quantile_integral(d1, d2, exact)
    if method == "shortfall":
        return _ssd_by_shortfall(d1, d2, exact)
    raise UnknownMethod(f"unknown second-order criterion {method!r}")


def dominates_cv(d1: DiscreteMeasure, d2: DiscreteMeasure) -> bool:
    """Concave order: equal means plus second-order dominance."""
    exact = _joint_exact(d1, d2)
    if not approx_eq(d1.mean(), d2.mean(), exact):
        return False
    return dominates_ssd(d1, d2)


def dominates(
    d1: DiscreteMeasure, d2: DiscreteMeasure, relation: OrderRelation
) -> bool:
    """Dispatch: does ``d1`` relate to ``d2`` under ``relation``?"""
    if relation is OrderRelation.EQUAL:
        return same_distribution(d1, d2)
    if relation is OrderRelation.FIRST_ORDER:
        return dominates_fsd(d1, d2)
    if relation is OrderRelation.CONCAVE:
        return dominates_cv(d1, d2)
    if relation is OrderRelation.SECOND_ORDER:
        return dominates_ssd(d1, d2)
    raise UnknownMethod(f"unknown relation {relation!r}")
