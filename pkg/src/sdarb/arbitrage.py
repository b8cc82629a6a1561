"""Minimum-price payoffs under stochastic-order constraints.

For a market with grid ``x_1 < ... < x_n`` the minimizers are:

* second-order dominance (LP): variables ``theta_i`` in ``[0, x_n]`` and
  shortfall auxiliaries ``s_ij >= 0``; for every threshold ``t = x_j``:
  ``s_ij >= t - theta_i`` and ``sum_i mu_i s_ij <= E[(t - X)_+]``.
  Checking thresholds at the grid atoms is exact because the shortfall
  difference is convex between atoms and constant beyond them.
* concave order (LP): the same program plus mean preservation
  ``sum_i mu_i theta_i = sum_i mu_i x_i``.
* first-order dominance (MILP): value-selection binaries ``v_ik``
  (state ``i`` pays grid value ``x_k``) with pick-one rows per state and
  cumulative mass rows ``sum_i mu_i sum_{k<=j} v_ik <= F(x_j)``.  Some
  minimizer takes grid values only, so the restriction is lossless; an
  equivalent big-M indicator form with free payoff levels is kept for
  cross checks (``fsd_formulation="bigm"``).
* distributional equality (MILP): assignment binaries ``a_ik``
  (``theta_i = x_k``) with ``sum_k a_ik = 1`` and mass matching
  ``sum_i mu_i a_ik = mu_k``; objective ``sum_{i,k} nu_i x_k a_ik``.

Identity payoffs (the market portfolio itself) are always feasible and
seed the branch and bound as incumbents; the first-order tree also
starts from a greedy assignment with local descent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import PreconditionInadequate, SolverError, UnknownMethod
from .lp import (
    ProgramBuilder,
    SolveStatus,
    solve_lp,
    solve_milp,
)
from .measures import (
    MarketModel,
    PayoffProfile,
    is_adequate,
    is_kernel_monotone,
    kernel_distribution,
    market_price,
    price,
    quantile,
)
from .numeric import EPS_ARB, EPS_COMPARE, approx_eq, number_str
from .ompd import ompd, ompd_price
from .orders import OrderRelation, expected_shortfall
from .rearrange import quantile_product_integral

__all__ = [
    "MinPriceResult",
    "min_price",
    "has_stochastic_arbitrage",
    "ssd_lower_bound",
    "Prop1Report",
    "Prop2Report",
    "check_prop1",
    "check_prop2",
    "report_to_json",
]


@dataclass(frozen=True)
class MinPriceResult:
    relation: OrderRelation
    status: SolveStatus
    payoff: Optional[PayoffProfile]
    value: object
    iterations: int
    node_count: int = 0

    @property
    def ok(self) -> bool:
        return self.status is SolveStatus.OPTIMAL


def _clean_payoff(values) -> PayoffProfile:
    out = []
    for v in values:
        if isinstance(v, float) and -1e-7 < v < 0:
            v = 0.0
        out.append(v)
    return PayoffProfile(tuple(out))


def _ssd_program(m: MarketModel, concave: bool):
    """LP for the second-order (optionally concave) minimizer."""
    b = ProgramBuilder()
    n = m.n
    xs = m.grid
    top = xs[-1]
    for i in range(n):
        b.add_var(f"theta{i}", lower=0, upper=top, objective=m.nu[i])
    s_index = {}
    for j in range(n):
        for i in range(n):
            s_index[i, j] = b.add_var(f"s_{i}_{j}", lower=0, upper=None)
    for j in range(n):
        t = xs[j]
        for i in range(n):
            # s_ij >= t - theta_i
            b.add_row({i: 1, s_index[i, j]: 1}, ">=", t)
        b.add_row(
            {s_index[i, j]: m.mu[i] for i in range(n)},
            "<=",
            expected_shortfall(m.objective, t),
        )
    if concave:
        b.add_row(
            {i: m.mu[i] for i in range(n)},
            "=",
            sum(w * x for w, x in zip(m.mu, xs)),
        )
    lp = b.build_lp()
    crash = frozenset(range(n))  # theta at x_n makes the slack basis feasible
    return lp, crash


def _fsd_program(m: MarketModel):
    """Indicator MILP for the first-order minimizer (big-M form).

    Free payoff levels with binaries c_ij marking states allowed to fall
    below the next grid point; the mass of such states at level j may
    not exceed the market payoff's distribution function there.
    """
    b = ProgramBuilder()
    n = m.n
    xs = m.grid
    big = xs[-1] - xs[0]
    for i in range(n):
        b.add_var(f"theta{i}", lower=xs[0], upper=xs[-1], objective=m.nu[i])
    c_index = {}
    for j in range(n - 1):
        for i in range(n):
            c_index[i, j] = b.add_var(f"c_{i}_{j}", lower=0, upper=1, integer=True)
    cum = 0
    for j in range(n - 1):
        cum = cum + m.mu[j]  # F(x_j)
        for i in range(n):
            # theta_i + M c_ij >= x_{j+1}
            b.add_row({i: 1, c_index[i, j]: big}, ">=", xs[j + 1])
        b.add_row({c_index[i, j]: m.mu[i] for i in range(n)}, "<=", cum)
    mip = b.build_milp()
    incumbent = list(xs)
    for j in range(n - 1):
        for i in range(n):
            incumbent.append(1 if xs[i] <= xs[j] else 0)
    crash = frozenset(range(n))
    return mip, tuple(incumbent), crash


def _fsd_grid_program(m: MarketModel):
    """Value-selection MILP for the first-order minimizer.

    Some minimizer takes grid values only: rounding any feasible payoff
    down to the grid lowers the price and keeps every cumulative mass
    cap satisfied.  So state i picks one grid value (binaries v_ik) and
    the picked mass at or below x_j stays within the market payoff's
    distribution function.  The relaxation is far tighter than big-M
    indicators; with a uniform objective measure it is a network flow
    and solves integrally at the root.
    """
    b = ProgramBuilder()
    n = m.n
    xs = m.grid
    v_index = {}
    for i in range(n):
        for k in range(n):
            v_index[i, k] = b.add_var(
                f"v_{i}_{k}",
                lower=0,
                upper=1,
                objective=m.nu[i] * xs[k],
                integer=True,
            )
    for i in range(n):
        b.add_row({v_index[i, k]: 1 for k in range(n)}, "=", 1)
    # sorted mass prefixes give per-slot state-count caps: t states at or
    # below slot j weigh at least the t smallest masses, so t exceeding
    # k_j = max{t: smallest-t mass sum <= F(x_j)} breaks the mass cap.
    # The count rows are implied for integer points but cut fractional
    # ones hard; with equal masses they make the relaxation integral.
    tol = 0 if m.exact else 1e-12
    asc = sorted(m.mu)
    asc_prefix = []
    acc = 0
    for w in asc:
        acc = acc + w
        asc_prefix.append(acc)
    cum = 0
    for j in range(n - 1):
        cum = cum + m.mu[j]
        b.add_row(
            {v_index[i, k]: m.mu[i] for i in range(n) for k in range(j + 1)},
            "<=",
            cum,
        )
        k_j = 0
        while k_j < n and asc_prefix[k_j] <= cum + tol:
            k_j += 1
        b.add_row(
            {v_index[i, k]: 1 for i in range(n) for k in range(j + 1)},
            "<=",
            k_j,
        )
    mip = b.build_milp()
    incumbent = tuple(1 if i == k else 0 for i in range(n) for k in range(n))
    crash = frozenset(v_index[i, i] for i in range(n))
    return mip, incumbent, crash, v_index


def _equal_program(m: MarketModel):
    """MILP for the distribution-preserving minimizer."""
    b = ProgramBuilder()
    n = m.n
    xs = m.grid
    a_index = {}
    for i in range(n):
        for k in range(n):
            a_index[i, k] = b.add_var(
                f"a_{i}_{k}",
                lower=0,
                upper=1,
                objective=m.nu[i] * xs[k],
                integer=True,
            )
    for i in range(n):
        b.add_row({a_index[i, k]: 1 for k in range(n)}, "=", 1)
    for k in range(n):
        b.add_row({a_index[i, k]: m.mu[i] for i in range(n)}, "=", m.mu[k])
    mip = b.build_milp()
    incumbent = tuple(1 if i == k else 0 for i in range(n) for k in range(n))
    crash = frozenset(a_index[i, i] for i in range(n))
    return mip, incumbent, crash, a_index


def _fsd_caps(m: MarketModel) -> list:
    caps = []
    acc = 0
    for w in m.mu[:-1]:
        acc = acc + w
        caps.append(acc)  # F(x_j) for j = 0..n-2
    return caps


def _fsd_descend(m: MarketModel, assign, used, caps, tol) -> None:
    """Local improvement: move states to cheaper values, swap pairs."""
    n = m.n
    by_cost = sorted(range(n), key=lambda i: (-m.nu[i], i))
    for _ in range(12):
        changed = False
        for i in by_cost:
            k = assign[i]
            for k2 in range(k):
                if all(used[j] + m.mu[i] <= caps[j] + tol for j in range(k2, k)):
                    for j in range(k2, k):
                        used[j] = used[j] + m.mu[i]
                    assign[i] = k2
                    changed = True
                    break
        for i in range(n):
            for i2 in range(n):
                ki, k2 = assign[i], assign[i2]
                if k2 >= ki or not m.nu[i] > m.nu[i2]:
                    continue
                delta = m.mu[i] - m.mu[i2]
                if all(used[j] + delta <= caps[j] + tol for j in range(k2, ki)):
                    for j in range(k2, ki):
                        used[j] = used[j] + delta
                    assign[i], assign[i2] = k2, ki
                    changed = True
        if not changed:
            break


def _fsd_greedy_assignment(m: MarketModel) -> list:
    """Feasible value assignment: pricey states grab the lowest value the
    cumulative caps still allow, then local descent tightens it."""
    n = m.n
    caps = _fsd_caps(m)
    tol = 0 if m.exact else 1e-12
    used = [0] * (n - 1)
    assign = [n - 1] * n
    for i in sorted(range(n), key=lambda i: (-m.nu[i], i)):
        for k in range(n):
            if all(used[j] + m.mu[i] <= caps[j] + tol for j in range(k, n - 1)):
                assign[i] = k
                for j in range(k, n - 1):
                    used[j] = used[j] + m.mu[i]
                break
    _fsd_descend(m, assign, used, caps, tol)
    return assign


def _fsd_vector(m: MarketModel, assign, v_index) -> tuple:
    x = [0] * (m.n * m.n)
    for i, k in enumerate(assign):
        x[v_index[i, k]] = 1
    return tuple(x)


def _theta_from_assignment(m: MarketModel, x, a_index, exact: bool):
    out = []
    for i in range(m.n):
        chosen = None
        for k in range(m.n):
            v = x[a_index[i, k]]
            if (exact and v == 1) or (not exact and v > 0.5):
                chosen = m.grid[k]
                break
        if chosen is None:
            raise SolverError("assignment solution has an unassigned row")
        out.append(chosen)
    return PayoffProfile(tuple(out))


def min_price(
    m: MarketModel,
    relation: OrderRelation,
    *,
    mode: str = "auto",
    node_limit: int = 10**5,
    iteration_limit: int = 10**6,
    fsd_formulation: str = "grid",
) -> MinPriceResult:
    """Minimum price over payoffs relating to the market payoff.

    The optimum payoff (when found) and value come back together with
    solver effort counters.  ``mode`` selects the arithmetic as in
    :func:`sdarb.lp.solve_lp`.  The first-order problem is solved with
    value-selection binaries by default; ``fsd_formulation="bigm"``
    picks the equivalent indicator form instead (kept for cross checks,
    much slower on bigger grids).
    """
    if relation in (OrderRelation.SECOND_ORDER, OrderRelation.CONCAVE):
        lp, crash = _ssd_program(m, relation is OrderRelation.CONCAVE)
        res = solve_lp(
            lp,
            mode=mode,
            iteration_limit=iteration_limit,
            start_at_upper=crash,
        )
        payoff = _clean_payoff(res.x[: m.n]) if res.ok else None
        return MinPriceResult(
            relation, res.status, payoff, res.objective, res.iterations
        )
    if relation is OrderRelation.FIRST_ORDER:
        if fsd_formulation == "grid":
            mip, incumbent, crash, v_index = _fsd_grid_program(m)
            greedy = _fsd_vector(m, _fsd_greedy_assignment(m), v_index)
            obj = mip.relaxation.objective
            if sum(c * v for c, v in zip(obj, greedy)) < sum(
                c * v for c, v in zip(obj, incumbent)
            ):
                incumbent = greedy
            res = solve_milp(
                mip,
                mode=mode,
                node_limit=node_limit,
                iteration_limit=iteration_limit,
                incumbent=incumbent,
                start_at_upper=crash,
            )
            exact = mip.relaxation.exact if mode == "auto" else mode == "rational"
            payoff = (
                _theta_from_assignment(m, res.x, v_index, exact)
                if res.x is not None
                else None
            )
            return MinPriceResult(
                relation,
                res.status,
                payoff,
                res.objective,
                res.iterations,
                res.node_count,
            )
        if fsd_formulation != "bigm":
            raise UnknownMethod(f"unknown formulation {fsd_formulation!r}")
        mip, incumbent, crash = _fsd_program(m)
        res = solve_milp(
            mip,
            mode=mode,
            node_limit=node_limit,
            iteration_limit=iteration_limit,
            incumbent=incumbent,
            start_at_upper=crash,
        )
        payoff = _clean_payoff(res.x[: m.n]) if res.x is not None else None
        return MinPriceResult(
            relation, res.status, payoff, res.objective, res.iterations, res.node_count
        )
    if relation is OrderRelation.EQUAL:
        mip, incumbent, crash, a_index = _equal_program(m)
        res = solve_milp(
            mip,
            mode=mode,
            node_limit=node_limit,
            iteration_limit=iteration_limit,
            incumbent=incumbent,
            start_at_upper=crash,
        )
        exact = mip.relaxation.exact if mode == "auto" else mode == "rational"
        payoff = (
            _theta_from_assignment(m, res.x, a_index, exact)
            if res.x is not None
            else None
        )
        return MinPriceResult(
            relation, res.status, payoff, res.objective, res.iterations, res.node_count
        )
    raise UnknownMethod(f"unknown relation {relation!r}")


def ssd_lower_bound(m: MarketModel):
    """Anti-aligned quantile product integral: a lower bound for the
    second-order minimum price on any market."""
    return quantile_product_integral(
        quantile(m.objective), quantile(kernel_distribution(m))
    )


def has_stochastic_arbitrage(
    m: MarketModel, relation: OrderRelation, *, mode: str = "auto"
) -> bool:
    """Is there a payoff relating to the market payoff but strictly cheaper?"""
    res = min_price(m, relation, mode=mode)
    if not res.ok:
        raise SolverError(f"minimizer did not converge: {res.status}")
    ref = market_price(m)
    if m.exact and mode != "float":
        return res.value < ref
    return res.value < ref - EPS_ARB


@dataclass(frozen=True)
class Prop1Report:
    """Equivalence on any market: concave-order arbitrage, second-order
    arbitrage and kernel non-monotonicity coincide."""

    market: object
    cv_value: object
    ssd_value: object
    kernel_monotone: bool
    cv_arbitrage: bool
    ssd_arbitrage: bool

    @property
    def consistent(self) -> bool:
        return (
            self.cv_arbitrage == self.ssd_arbitrage == (not self.kernel_monotone)
        )


def check_prop1(m: MarketModel, *, mode: str = "auto") -> Prop1Report:
    ref = market_price(m)
    cv = min_price(m, OrderRelation.CONCAVE, mode=mode)
    sd = min_price(m, OrderRelation.SECOND_ORDER, mode=mode)
    if not (cv.ok and sd.ok):
        raise SolverError("minimizers did not converge")
    exact = m.exact and mode != "float"
    margin = 0 if exact else EPS_ARB
    return Prop1Report(
        market=ref,
        cv_value=cv.value,
        ssd_value=sd.value,
        kernel_monotone=is_kernel_monotone(m),
        cv_arbitrage=cv.value < ref - margin,
        ssd_arbitrage=sd.value < ref - margin,
    )


@dataclass(frozen=True)
class Prop2Report:
    """Five-way equivalence on uniform-objective markets, plus attainment
    of every minimum by the optimal measure preserving derivative."""

    market: object
    values: dict  # relation value -> minimum price
    ompd_value: object
    integral_bound: object
    kernel_monotone: bool
    arbitrage: dict  # relation value -> bool

    @property
    def equivalent(self) -> bool:
        flags = set(self.arbitrage.values())
        flags.add(not self.kernel_monotone)
        return len(flags) == 1

    @property
    def minima_agree(self) -> bool:
        vals = list(self.values.values()) + [self.ompd_value, self.integral_bound]
        first = vals[0]
        exact = all(not isinstance(v, float) for v in vals)
        return all(approx_eq(v, first, exact) for v in vals[1:])


def check_prop2(m: MarketModel, *, mode: str = "auto") -> Prop2Report:
    if not is_adequate(m):
        raise PreconditionInadequate("objective measure must be uniform")
    ref = market_price(m)
    exact = m.exact and mode != "float"
    margin = 0 if exact else EPS_ARB
    values = {}
    arbitrage = {}
    for rel in OrderRelation:
        res = min_price(m, rel, mode=mode)
        if not res.ok:
            raise SolverError(f"{rel.value} minimizer did not converge: {res.status}")
        values[rel.value] = res.value
        arbitrage[rel.value] = res.value < ref - margin
    return Prop2Report(
        market=ref,
        values=values,
        ompd_value=ompd_price(m),
        integral_bound=ssd_lower_bound(m),
        kernel_monotone=is_kernel_monotone(m),
        arbitrage=arbitrage,
    )


def min_price_to_json(res: MinPriceResult) -> dict:
    """Serialize a minimization result with mode-faithful number strings."""
    return {
        "order": res.relation.value,
        "status": res.status.value,
        "value": None if res.value is None else number_str(res.value),
        "payoff": (
            None
            if res.payoff is None
            else [number_str(v) for v in res.payoff.values]
        ),
        "iterations": res.iterations,
        "node_count": res.node_count,
    }


def report_to_json(report) -> dict:
    """Serialize a check report with mode-faithful number strings."""
    if isinstance(report, Prop1Report):
        return {
            "kind": "prop1",
            "market": number_str(report.market),
            "cv_value": number_str(report.cv_value),
            "ssd_value": number_str(report.ssd_value),
            "kernel_monotone": report.kernel_monotone,
            "cv_arbitrage": report.cv_arbitrage,
            "ssd_arbitrage": report.ssd_arbitrage,
            "consistent": report.consistent,
        }
    if isinstance(report, Prop2Report):
        return {
            "kind": "prop2",
            "market": number_str(report.market),
            "values": {k: number_str(v) for k, v in report.values.items()},
            "ompd_value": number_str(report.ompd_value),
            "integral_bound": number_str(report.integral_bound),
            "kernel_monotone": report.kernel_monotone,
            "arbitrage": dict(report.arbitrage),
            "equivalent": report.equivalent,
            "minima_agree": report.minima_agree,
        }
    raise UnknownMethod(f"unknown report type {type(report).__name__}")
