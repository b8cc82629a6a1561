"""Discretizing a continuous market and studying convergence.

A continuous market is given by a tabulated objective density and a
pricing kernel.  The discrete approximation with ``n`` cells partitions
an interval into equal subintervals, puts an atom at each subinterval
midpoint carrying the objective probability of the subinterval (tail
mass outside the interval folds into the extreme cells), and assigns
risk-neutral mass ``nu{x_i} = pi(x_i) mu{x_i}`` without renormalizing,
so kernel shape is preserved exactly at the atoms.

The continuous-limit benchmark payoff is ``theta(x) = Q(1 - F_pi(pi(x)))``
with all ingredients built from the density table: cumulative
distribution by trapezoid integration, kernel CDF by objective-weighted
counting on the sample grid, quantile by linear interpolation.  These
computations are float-only by nature.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .arbitrage import min_price
from .errors import (
    EmptyMass,
    FlatKernelRegion,
    LengthMismatch,
    NonIncreasingAtoms,
    NonpositiveKernel,
    SdarbError,
)
from .measures import (
    DiscreteMeasure,
    MarketModel,
    PayoffProfile,
    market_price,
    new_market,
)
from .orders import OrderRelation

__all__ = [
    "DensityTable",
    "read_density_csv",
    "write_density_csv",
    "tabulated_function",
    "discretize_density",
    "risk_neutral_from_kernel",
    "market_from_tables",
    "continuous_ompd",
    "ConvergenceRecord",
    "convergence_study",
]


@dataclass(frozen=True)
class DensityTable:
    """Sampled nonnegative function: strictly increasing grid, values."""

    grid: tuple
    values: tuple

    def __post_init__(self):
        if len(self.grid) != len(self.values):
            raise LengthMismatch(
                f"{len(self.grid)} grid points, {len(self.values)} values"
            )
        if len(self.grid) < 2:
            raise SdarbError("density table needs at least two samples")
        for a, b in zip(self.grid, self.grid[1:]):
            if not a < b:
                raise NonIncreasingAtoms(f"table grid must increase: {a} !< {b}")
        for v in self.values:
            if v < 0:
                raise SdarbError(f"negative table value {v}")

    @property
    def span(self) -> tuple:
        return (self.grid[0], self.grid[-1])


def read_density_csv(path) -> DensityTable:
    xs, ys = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].lstrip().startswith("#"):
                continue
            xs.append(float(row[0]))
            ys.append(float(row[1]))
    return DensityTable(tuple(xs), tuple(ys))


def write_density_csv(path, table: DensityTable) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for x, y in zip(table.grid, table.values):
            w.writerow(["%.17g" % x, "%.17g" % y])


def tabulated_function(table: DensityTable) -> Callable[[float], float]:
    """Linear interpolation of a table (constant beyond the ends)."""
    xs = np.asarray(table.grid)
    ys = np.asarray(table.values)

    def f(x):
        return float(np.interp(x, xs, ys))

    return f


def _trapezoid_mass(table: DensityTable, a: float, b: float) -> float:
    """Integral of the tabulated density over [a, b] (table treated as
    piecewise linear, zero outside its span)."""
    xs = np.asarray(table.grid, dtype=float)
    ys = np.asarray(table.values, dtype=float)
    a = max(a, xs[0])
    b = min(b, xs[-1])
    if b <= a:
        return 0.0
    inside = xs[(xs > a) & (xs < b)]
    pts = np.concatenate([[a], inside, [b]])
    vals = np.interp(pts, xs, ys)
    return float(np.trapezoid(vals, pts))


def discretize_density(
    table: DensityTable, n: int, interval: tuple | None = None
) -> DiscreteMeasure:
    """Objective measure with ``n`` midpoint atoms on ``interval``.

    ``interval`` defaults to the table's span.  Mass outside the
    interval folds into the first and last cells; masses renormalize to
    a probability.  A cell with no mass raises :class:`EmptyMass`.
    """
    if n < 1:
        raise SdarbError("need at least one cell")
    lo, hi = interval if interval is not None else table.span
    if not lo < hi:
        raise SdarbError(f"empty interval ({lo}, {hi})")
    width = (hi - lo) / n
    atoms = tuple(lo + width * (i + 0.5) for i in range(n))
    masses = []
    for i in range(n):
        a = lo + width * i
        b = lo + width * (i + 1)
        masses.append(_trapezoid_mass(table, a, b))
    # fold tails
    masses[0] += _trapezoid_mass(table, table.span[0], lo)
    masses[-1] += _trapezoid_mass(table, hi, table.span[1])
    total = sum(masses)
    if total <= 0:
        raise EmptyMass("table carries no mass on the interval")
    masses = [w / total for w in masses]
    for i, w in enumerate(masses):
        if w <= 0:
            raise EmptyMass(f"cell {i} at {atoms[i]} has no mass")
    return DiscreteMeasure(atoms, tuple(masses), exact=False)


def risk_neutral_from_kernel(
    mu: DiscreteMeasure, kernel: Callable[[float], float]
) -> DiscreteMeasure:
    """``nu{x} = kernel(x) mu{x}``, deliberately not renormalized."""
    masses = []
    for x, w in zip(mu.atoms, mu.masses):
        k = kernel(float(x))
        if not k > 0:
            raise NonpositiveKernel(f"kernel({x}) = {k}")
        masses.append(k * float(w))
    return DiscreteMeasure(tuple(float(a) for a in mu.atoms), tuple(masses), exact=False)


def market_from_tables(
    table: DensityTable,
    kernel: Callable[[float], float],
    n: int,
    interval: tuple | None = None,
) -> MarketModel:
    mu = discretize_density(table, n, interval)
    nu = risk_neutral_from_kernel(mu, kernel)
    return new_market(mu.atoms, mu.masses, nu.masses)


def continuous_ompd(
    table: DensityTable,
    kernel: Callable[[float], float],
    eval_points: Sequence | None = None,
):
    """The limit payoff ``theta(x) = Q(1 - F_pi(pi(x)))`` from the table.

    With ``eval_points`` the payoff is tabulated there and returned as a
    :class:`PayoffProfile`; without, the callable itself comes back.

    The kernel CDF is the objective-weighted count
    ``F_pi(y) = mu{x : pi(x) <= y}`` on the sample grid, so kernels that
    revisit values (humps) are handled; an exactly flat kernel stretch
    on adjacent samples raises :class:`FlatKernelRegion` since the
    construction then needs the tie term that a sample grid cannot
    resolve.
    """
    xs = np.asarray(table.grid, dtype=float)
    ys = np.asarray(table.values, dtype=float)
    # per-sample objective weights (trapezoid), normalized
    dx = np.diff(xs)
    w = np.zeros(len(xs))
    w[:-1] += dx * (ys[:-1] + ys[1:]) / 4
    w[1:] += dx * (ys[:-1] + ys[1:]) / 4
    w = w / w.sum()
    # cumulative distribution at sample points, for the quantile inverse
    cum = np.concatenate([[0.0], np.cumsum(dx * (ys[:-1] + ys[1:]) / 2)])
    cum = cum / cum[-1]
    kern = np.asarray([kernel(float(x)) for x in xs])
    if np.any(kern <= 0):
        raise NonpositiveKernel("kernel must be positive on the sample grid")
    flat = kern[:-1] == kern[1:]
    if np.any(flat):
        where = int(np.nonzero(flat)[0][0])
        raise FlatKernelRegion(
            f"kernel is flat between samples {xs[where]} and {xs[where + 1]}"
        )
    order = np.argsort(kern, kind="stable")
    kern_sorted = kern[order]
    w_sorted_cum = np.cumsum(w[order])

    def f_pi(y: float) -> float:
        idx = np.searchsorted(kern_sorted, y, side="right")
        return float(w_sorted_cum[idx - 1]) if idx > 0 else 0.0

    def quantile_of_mu(u: float) -> float:
        u = min(max(u, 0.0), 1.0)
        return float(np.interp(u, cum, xs))

    def theta(x: float) -> float:
        return quantile_of_mu(1.0 - f_pi(kernel(float(x))))

    if eval_points is not None:
        return PayoffProfile(tuple(theta(float(x)) for x in eval_points))
    return theta


@dataclass(frozen=True)
class ConvergenceRecord:
    n: int
    market: MarketModel
    fsd_payoff: tuple
    ssd_payoff: tuple
    limit_payoff: tuple
    fsd_price: float
    ssd_price: float
    market_price: float
    fsd_gap: float
    ssd_gap: float


def convergence_study(
    table: DensityTable,
    kernel: Callable[[float], float],
    n_list: Sequence[int],
    interval: tuple | None = None,
    *,
    node_limit: int = 10**5,
) -> list:
    """Solve both dominance minimizers for each grid size and compare to
    the continuous-limit payoff at the atoms."""
    theta = continuous_ompd(table, kernel)
    out = []
    for n in n_list:
        m = market_from_tables(table, kernel, n, interval)
        fsd = min_price(m, OrderRelation.FIRST_ORDER, mode="float", node_limit=node_limit)
        ssd = min_price(m, OrderRelation.SECOND_ORDER, mode="float")
        if not (fsd.ok and ssd.ok):
            raise SdarbError(
                f"minimizers failed at n={n}: {fsd.status}, {ssd.status}"
            )
        limit = tuple(theta(float(x)) for x in m.grid)
        fsd_gap = max(
            abs(a - b) for a, b in zip(fsd.payoff.values, limit)
        )
        ssd_gap = max(
            abs(a - b) for a, b in zip(ssd.payoff.values, limit)
        )
        out.append(
            ConvergenceRecord(
                n=n,
                market=m,
                fsd_payoff=fsd.payoff.values,
                ssd_payoff=ssd.payoff.values,
                limit_payoff=limit,
                fsd_price=float(fsd.value),
                ssd_price=float(ssd.value),
                market_price=float(market_price(m)),
                fsd_gap=float(fsd_gap),
                ssd_gap=float(ssd_gap),
            )
        )
    return out
