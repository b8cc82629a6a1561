"""Discrete measures, market models and step functions.

Conventions used throughout the package:

* A market is a finite grid of payoff atoms ``x_1 < ... < x_n`` carrying
  two measures: the objective measure ``mu`` (a probability measure) and
  the risk-neutral measure ``nu`` (positive, not necessarily normalized,
  since discretizations of continuous markets need not renormalize).
  Mutual absolute continuity means every atom has positive mass under
  both measures; this is exactly the no-classical-arbitrage condition in
  a complete single-period market.
* The pricing kernel is the likelihood ratio ``pi_i = nu_i / mu_i``.
* CDFs are right-continuous step functions; quantile functions are the
  left-continuous generalized inverses, with ``Q(0)`` defined as the
  smallest atom.
* Arithmetic is exact (rationals) when every input number is exact, and
  IEEE-double otherwise; see :mod:`sdarb.numeric`.
"""

from __future__ import annotations

import json
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from functools import cached_property
from math import isfinite
from typing import Sequence, Union

from .errors import (
    LengthMismatch,
    MuNotProbability,
    NonIncreasingAtoms,
    NotProbability,
    SdarbError,
    ZeroMass,
)
from .numeric import (
    EPS_COMPARE,
    Rat,
    all_exact,
    approx_eq,
    as_float,
    geq,
    is_exact,
    number_str,
    to_number,
)

__all__ = [
    "DiscreteMeasure",
    "MarketModel",
    "PayoffProfile",
    "StepFunction",
    "cdf",
    "quantile",
    "new_market",
    "price",
    "market_price",
    "pushforward",
    "kernel_distribution",
    "is_kernel_monotone",
    "is_adequate",
    "market_to_json",
    "market_from_json",
    "read_market",
    "write_market",
]


def _canonical_numbers(values: Sequence) -> tuple[tuple, bool]:
    """Coerce a sequence and report the joint arithmetic mode.

    Returns ``(numbers, exact)``.  If any entry is a float the whole
    tuple is demoted to floats so downstream arithmetic stays in one
    mode.
    """
    nums = [to_number(v) for v in values]
    exact = all_exact(nums)
    if not exact:
        nums = [as_float(v) for v in nums]
    return tuple(nums), exact


@dataclass(frozen=True)
class DiscreteMeasure:
    """A finitely supported measure: strictly increasing atoms, positive masses."""

    atoms: tuple
    masses: tuple
    exact: bool

    def __post_init__(self):
        if len(self.atoms) != len(self.masses):
            raise LengthMismatch(
                f"{len(self.atoms)} atoms but {len(self.masses)} masses"
            )
        if not self.atoms:
            raise SdarbError("measure needs at least one atom")
        for a, b in zip(self.atoms, self.atoms[1:]):
            if not a < b:
                raise NonIncreasingAtoms(f"atoms must strictly increase: {a} !< {b}")
        for m in self.masses:
            if not m > 0:
                raise ZeroMass(f"atom mass {m} is not positive")

    @classmethod
    def from_pairs(cls, atoms: Sequence, masses: Sequence) -> "DiscreteMeasure":
        nums, exact = _canonical_numbers(list(atoms) + list(masses))
        k = len(atoms)
        return cls(nums[:k], nums[k:], exact)

    @cached_property
    def total_mass(self):
        return sum(self.masses)

    def is_probability(self, eps: float = EPS_COMPARE) -> bool:
        return approx_eq(self.total_mass, 1, self.exact, eps)

    def mean(self):
        return sum(a * m for a, m in zip(self.atoms, self.masses))


def _merge_weighted(values: Sequence, weights: Sequence, exact: bool) -> DiscreteMeasure:
    """Sort values, merge exact duplicates, sum their weights."""
    pairs = sorted(zip(values, weights), key=lambda p: p[0])
    atoms: list = []
    masses: list = []
    for v, w in pairs:
        if atoms and v == atoms[-1]:
            masses[-1] = masses[-1] + w
        else:
            atoms.append(v)
            masses.append(w)
    return DiscreteMeasure(tuple(atoms), tuple(masses), exact)


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant function on the line.

    ``values`` has one more entry than ``breakpoints``; value ``values[k]``
    applies on the k-th open interval between breakpoints.  At a
    breakpoint the function takes the right limit when
    ``right_continuous`` and the left limit otherwise.
    """

    breakpoints: tuple
    values: tuple
    right_continuous: bool = True

    def __post_init__(self):
        if len(self.values) != len(self.breakpoints) + 1:
            raise LengthMismatch(
                f"{len(self.breakpoints)} breakpoints need "
                f"{len(self.breakpoints) + 1} values, got {len(self.values)}"
            )
        for a, b in zip(self.breakpoints, self.breakpoints[1:]):
            if not a < b:
                raise NonIncreasingAtoms(
                    f"breakpoints must strictly increase: {a} !< {b}"
                )

    def __call__(self, x):
        if self.right_continuous:
            idx = bisect_right(self.breakpoints, x)
        else:
            idx = bisect_left(self.breakpoints, x)
        return self.values[idx]


def cdf(d: DiscreteMeasure) -> StepFunction:
    """Right-continuous distribution function of ``d``."""
    acc = Rat(0) if d.exact else 0.0
    levels = [acc]
    for m in d.masses:
        acc = acc + m
        levels.append(acc)
    return StepFunction(tuple(d.atoms), tuple(levels), right_continuous=True)


def quantile(d: DiscreteMeasure) -> StepFunction:
    """Left-continuous quantile function ``Q(u) = inf{x : F(x) >= u}`` on [0, 1].

    ``Q(0)`` evaluates to the smallest atom.  Requires a probability
    measure.
    """
    if not d.is_probability():
        raise NotProbability(f"total mass {d.total_mass} != 1")
    levels = []
    acc = Rat(0) if d.exact else 0.0
    for m in d.masses[:-1]:
        acc = acc + m
        levels.append(acc)
    return StepFunction(tuple(levels), tuple(d.atoms), right_continuous=False)


@dataclass(frozen=True)
class PayoffProfile:
    """A derivative payoff: one value per grid atom."""

    values: tuple

    def __post_init__(self):
        for v in self.values:
            if isinstance(v, float) and not isfinite(v):
                raise SdarbError(f"payoff value {v} is not finite")
            if v < 0:
                raise SdarbError(f"payoff value {v} is negative")


def payoff_values(m: "MarketModel", theta) -> tuple:
    """Normalize a payoff argument (profile or plain sequence) against ``m``."""
    vals = theta.values if isinstance(theta, PayoffProfile) else tuple(theta)
    if len(vals) != len(m.grid):
        raise LengthMismatch(
            f"payoff has {len(vals)} entries for a {len(m.grid)}-atom grid"
        )
    return PayoffProfile(tuple(to_number(v) for v in vals)).values


@dataclass(frozen=True)
class MarketModel:
    """Complete single-period market on a shared atom grid."""

    grid: tuple
    mu: tuple
    nu: tuple
    exact: bool

    @cached_property
    def kernel(self) -> tuple:
        return tuple(v / m for v, m in zip(self.nu, self.mu))

    @cached_property
    def objective(self) -> DiscreteMeasure:
        return DiscreteMeasure(self.grid, self.mu, self.exact)

    @cached_property
    def risk_neutral(self) -> DiscreteMeasure:
        return DiscreteMeasure(self.grid, self.nu, self.exact)

    @property
    def n(self) -> int:
        return len(self.grid)


def new_market(atoms: Sequence, mu: Sequence, nu: Sequence) -> MarketModel:
    """Validate and build a market model.

    Checks: equal lengths; strictly increasing nonnegative atoms; all
    masses strictly positive under both measures (mutual absolute
    continuity); ``mu`` sums to one.  ``nu`` need not be normalized.
    """
    if not (len(atoms) == len(mu) == len(nu)):
        raise LengthMismatch(
            f"lengths differ: {len(atoms)} atoms, {len(mu)} mu, {len(nu)} nu"
        )
    if not atoms:
        raise SdarbError("market needs at least one atom")
    nums, exact = _canonical_numbers(list(atoms) + list(mu) + list(nu))
    n = len(atoms)
    ax, mx, vx = nums[:n], nums[n : 2 * n], nums[2 * n :]
    for a, b in zip(ax, ax[1:]):
        if not a < b:
            raise NonIncreasingAtoms(f"grid must strictly increase: {a} !< {b}")
    if ax[0] < 0:
        raise SdarbError("grid atoms must be nonnegative")
    for w in mx:
        if not w > 0:
            raise ZeroMass(f"objective mass {w} is not positive")
    for w in vx:
        if not w > 0:
            raise ZeroMass(f"risk-neutral mass {w} is not positive")
    total = sum(mx)
    if not approx_eq(total, 1, exact):
        raise MuNotProbability(f"objective masses sum to {total}, expected 1")
    return MarketModel(ax, mx, vx, exact)


def price(m: MarketModel, theta) -> Union[int, float]:
    """Market price of a payoff: expectation under the risk-neutral measure."""
    vals = payoff_values(m, theta)
    return sum(v * t for v, t in zip(m.nu, vals))


def market_price(m: MarketModel):
    """Price of the underlying itself (the identity payoff)."""
    return sum(v * x for v, x in zip(m.nu, m.grid))


def pushforward(m: Union[MarketModel, DiscreteMeasure], values) -> DiscreteMeasure:
    """Distribution of a payoff under the objective measure.

    Distinct payoff values become atoms (sorted increasing) with their
    objective masses summed.  Value grouping uses exact equality in both
    modes; float payoffs that should coincide must coincide bitwise.
    """
    if isinstance(m, MarketModel):
        base_atoms, weights, exact = m.grid, m.mu, m.exact
    else:
        base_atoms, weights, exact = m.atoms, m.masses, m.exact
    vals = values.values if isinstance(values, PayoffProfile) else tuple(values)
    if len(vals) != len(base_atoms):
        raise LengthMismatch(
            f"{len(vals)} payoff values for {len(base_atoms)} atoms"
        )
    nums, vexact = _canonical_numbers(vals)
    exact = exact and vexact
    if not exact:
        nums = tuple(as_float(v) for v in nums)
        weights = tuple(as_float(w) for w in weights)
    return _merge_weighted(nums, weights, exact)


def kernel_distribution(m: MarketModel) -> DiscreteMeasure:
    """Objective distribution of the pricing kernel."""
    return _merge_weighted(m.kernel, m.mu, m.exact)


def is_kernel_monotone(m: MarketModel, eps: float = EPS_COMPARE) -> bool:
    """True when the kernel is nonincreasing along the grid."""
    return all(
        geq(a, b, m.exact, eps) for a, b in zip(m.kernel, m.kernel[1:])
    )


def is_adequate(m: MarketModel, eps: float = EPS_COMPARE) -> bool:
    """True when the objective measure is uniform over the grid."""
    first = m.mu[0]
    return all(approx_eq(w, first, m.exact, eps) for w in m.mu[1:])


# ---------------------------------------------------------------------------
# Market files: JSON with keys "atoms", "mu", "nu".  Exact numbers are
# "p/q" strings; float markets use JSON numbers.  Reading infers the mode
# from the content, writing emits a canonical form that round-trips
# byte-identically in exact mode.
# ---------------------------------------------------------------------------


def _encode(x):
    if is_exact(x):
        return number_str(x)
    return float(x)


def market_to_json(m: MarketModel) -> dict:
    return {
        "atoms": [_encode(x) for x in m.grid],
        "mu": [_encode(x) for x in m.mu],
        "nu": [_encode(x) for x in m.nu],
    }


def market_from_json(obj: dict) -> MarketModel:
    try:
        atoms, mu, nu = obj["atoms"], obj["mu"], obj["nu"]
    except (KeyError, TypeError) as exc:
        raise SdarbError(f"market object needs atoms/mu/nu keys: {exc}") from exc
    return new_market(atoms, mu, nu)


def write_market(path, m: MarketModel) -> None:
    text = json.dumps(market_to_json(m), indent=2, sort_keys=True) + "\n"
    with open(path, "w") as fh:
        fh.write(text)


def read_market(path) -> MarketModel:
    with open(path) as fh:
        obj = json.load(fh)
    return market_from_json(obj)
