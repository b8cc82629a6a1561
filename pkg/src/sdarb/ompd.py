"""Cheapest payoff with the market's own distribution.

Construction: with kernel ``pi`` and objective quantile ``Q``,

    theta_i = Q(1 - F_pi(pi_i) + t_i),
    F_pi(y) = sum_j mu_j [pi_j <= y],
    t_i     = sum_{j <= i} mu_j [pi_j == pi_i],

which anti-aligns payoff against kernel: high kernel states receive low
quantiles.  The tie term walks each kernel level set in grid order, so
the construction is deterministic and, within a level set, order
preserving (a constant kernel yields the identity payoff).

Kernel ties are detected by exact value equality in both arithmetic
modes; pass ``tie_eps`` to merge nearly equal float kernels explicitly.
"""

from __future__ import annotations

from dataclasses import dataclass

from .measures import (
    MarketModel,
    PayoffProfile,
    is_adequate,
    kernel_distribution,
    price,
    pushforward,
    quantile,
)
from .numeric import EPS_COMPARE, EPS_KERNEL, approx_eq
from .orders import same_distribution
from .rearrange import is_countermonotone, quantile_product_integral

__all__ = ["ompd", "ompd_price", "verify_ompd", "OmpdReport"]


def _classify(a, b, tie_eps) -> int:
    """-1, 0, +1 for a < b, a == b, a > b, with ties widened by tie_eps."""
    if tie_eps:
        if abs(a - b) <= tie_eps:
            return 0
        return -1 if a < b else 1
    if a == b:
        return 0
    return -1 if a < b else 1


def _quantile_at(q, u, exact: bool):
    """Evaluate a quantile step function, snapping float arguments onto a
    breakpoint level within the comparison tolerance.

    The construction's argument is algebraically a sum of atom masses, so
    it should land exactly on a cumulative level; float rounding can push
    it an ulp past the level, which would jump to the next atom."""
    if not exact:
        for b in q.breakpoints:
            if abs(u - b) <= EPS_COMPARE:
                return q(b)
    return q(u)


def ompd(m: MarketModel, tie_eps: float = 0.0) -> PayoffProfile:
    """The optimal measure-preserving derivative payoff."""
    q = quantile(m.objective)
    kern = m.kernel
    n = m.n
    out = []
    for i in range(n):
        below_or_eq = 0  # F_pi(pi_i)
        tie = 0  # mass of kernel ties up to and including i
        for j in range(n):
            c = _classify(kern[j], kern[i], tie_eps)
            if c <= 0:
                below_or_eq = below_or_eq + m.mu[j]
            if c == 0 and j <= i:
                tie = tie + m.mu[j]
        out.append(_quantile_at(q, 1 - below_or_eq + tie, m.exact))
    return PayoffProfile(tuple(out))


def ompd_price(m: MarketModel, tie_eps: float = 0.0):
    return price(m, ompd(m, tie_eps))


@dataclass(frozen=True)
class OmpdReport:
    """Audit of the defining properties of the construction on a market."""

    adequate: bool
    countermonotone: bool
    distribution_preserved: bool
    price: object
    lower_bound: object
    price_equals_bound: bool
    near_kernel_ties: bool


def verify_ompd(m: MarketModel, tie_eps: float = 0.0) -> OmpdReport:
    """Check the construction against its contract on ``m``.

    ``countermonotone`` holds for every market.  ``distribution_preserved``
    and ``price_equals_bound`` are guaranteed when the objective measure
    is uniform; on general markets they are reported as observed.  The
    lower bound is the anti-aligned quantile product integral
    ``int_0^1 Q_mu(u) Q_pi(1-u) du``.
    """
    theta = ompd(m, tie_eps)
    p = price(m, theta)
    bound = quantile_product_integral(
        quantile(m.objective), quantile(kernel_distribution(m))
    )
    kern_sorted = sorted(m.kernel)
    near = False
    if not m.exact:
        near = any(
            a != b and abs(a - b) <= EPS_KERNEL
            for a, b in zip(kern_sorted, kern_sorted[1:])
        )
    return OmpdReport(
        adequate=is_adequate(m),
        countermonotone=is_countermonotone(m, theta, m.kernel),
        distribution_preserved=same_distribution(
            pushforward(m, theta), m.objective
        ),
        price=p,
        lower_bound=bound,
        price_equals_bound=approx_eq(p, bound, m.exact),
        near_kernel_ties=near,
    )
