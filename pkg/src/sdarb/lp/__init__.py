"""Linear programming layer: program containers, solvers, certificates.

``solve_lp`` dispatches on arithmetic mode: exact-rational programs go
to the dense tableau simplex (exact pivots), float programs go to the
dense lane when small and to the sparse revised lane when large.
``solve_milp`` wraps branch and bound around either.
"""

from __future__ import annotations

from typing import Optional, Sequence

from ..errors import SolverError
from ..numeric import EPS_COMPARE, Rat, as_exact, as_float
from .branch_bound import solve_milp as _solve_milp_impl
from .dense import solve_dense
from .model import (
    LinearProgram,
    LinearRow,
    MixedIntegerProgram,
    OptResult,
    ProgramBuilder,
    SolveStatus,
    constraint_violation,
    dump_program,
    is_feasible,
)
from .revised import solve_revised

__all__ = [
    "LinearProgram",
    "LinearRow",
    "MixedIntegerProgram",
    "OptResult",
    "ProgramBuilder",
    "SolveStatus",
    "constraint_violation",
    "dump_program",
    "is_feasible",
    "solve_lp",
    "solve_milp",
    "certify_optimal",
    "convert_mode",
]

# float programs with at most this many rows use the dense lane
DENSE_FLOAT_MAX_ROWS = 150
# default pricing; "dantzig" switches itself to Bland after a degenerate
# streak, which keeps exact solves provably finite (see lp.dense)
DEFAULT_PRICING = "dantzig"


def _resolve_mode(lp: LinearProgram, mode: str) -> bool:
    """True for exact arithmetic."""
    if mode == "auto":
        return lp.exact
    if mode == "rational":
        return True
    if mode == "float":
        return False
    raise SolverError(f"unknown mode {mode!r}")


def convert_mode(lp: LinearProgram, exact: bool) -> LinearProgram:
    """Coerce every number in the program to the requested mode."""
    conv = as_exact if exact else as_float
    rows = tuple(
        LinearRow(
            tuple((j, conv(a)) for j, a in row.coeffs), row.relation, conv(row.rhs)
        )
        for row in lp.rows
    )
    return LinearProgram(
        tuple(conv(c) for c in lp.objective),
        rows,
        tuple(None if b is None else conv(b) for b in lp.lower),
        tuple(None if b is None else conv(b) for b in lp.upper),
        lp.names,
    )


def solve_lp(
    lp: LinearProgram,
    *,
    mode: str = "auto",
    pricing: str = DEFAULT_PRICING,
    iteration_limit: int = 10**6,
    start_at_upper=frozenset(),
    want_duals: bool = False,
) -> OptResult:
    """Minimize the program; returns a basic optimal solution.

    ``mode`` is "auto" (follow the data), "rational" or "float"; data is
    converted when it does not match.  ``start_at_upper`` is a crash
    hint: those variables start nonbasic at their upper bound, which can
    make the initial basis feasible and skip phase 1 entirely.
    """
    exact = _resolve_mode(lp, mode)
    if exact != lp.exact:
        lp = convert_mode(lp, exact)
    if exact:
        return solve_dense(
            lp,
            exact=True,
            pricing=pricing,
            iteration_limit=iteration_limit,
            start_at_upper=start_at_upper,
            want_duals=want_duals,
        )
    if lp.num_rows <= DENSE_FLOAT_MAX_ROWS:
        return solve_dense(
            lp,
            exact=False,
            pricing=pricing,
            iteration_limit=iteration_limit,
            start_at_upper=start_at_upper,
            want_duals=want_duals,
        )
    return solve_revised(
        lp,
        pricing=pricing,
        iteration_limit=iteration_limit,
        start_at_upper=start_at_upper,
        want_duals=want_duals,
    )


def solve_milp(
    mip: MixedIntegerProgram,
    *,
    mode: str = "auto",
    pricing: str = DEFAULT_PRICING,
    node_limit: int = 10**5,
    iteration_limit: int = 10**6,
    incumbent: Optional[Sequence] = None,
    start_at_upper=frozenset(),
) -> OptResult:
    exact = _resolve_mode(mip.relaxation, mode)
    base = mip.relaxation
    if exact != base.exact:
        mip = MixedIntegerProgram(convert_mode(base, exact), mip.integer_vars)

    def node_solver(node_lp: LinearProgram) -> OptResult:
        return solve_lp(
            node_lp,
            mode="rational" if exact else "float",
            pricing=pricing,
            iteration_limit=iteration_limit,
            start_at_upper=start_at_upper,
        )

    return _solve_milp_impl(
        mip,
        node_solver,
        exact=exact,
        node_limit=node_limit,
        iteration_limit=iteration_limit,
        incumbent=incumbent,
    )


def certify_optimal(lp: LinearProgram, res: OptResult, eps: float = EPS_COMPARE) -> bool:
    """Independent optimality certificate from duals and reduced costs.

    Verifies (a) primal feasibility, (b) stationarity
    ``c_j = sum_i y_i a_ij + r_j``, (c) sign conditions: ``y_i <= 0`` for
    "<=" rows, ``y_i >= 0`` for ">=" rows, ``r_j >= 0`` for variables at
    their lower bound, ``r_j <= 0`` at their upper bound, ``r_j = 0``
    strictly between, and (d) complementary slackness for rows.  Exact
    programs are certified with zero tolerance.
    """
    if res.status is not SolveStatus.OPTIMAL or res.x is None:
        return False
    if res.duals is None or res.reduced_costs is None:
        raise SolverError("result carries no duals; solve with want_duals=True")
    exact = lp.exact and all(not isinstance(v, float) for v in res.x)
    tol = 0 if exact else eps
    x, y, r = res.x, res.duals, res.reduced_costs

    if constraint_violation(lp, x) > tol:
        return False

    # stationarity: recompute reduced costs from the duals
    recomputed = list(lp.objective)
    for i, row in enumerate(lp.rows):
        yi = y[i]
        if yi:
            for j, a in row.coeffs:
                recomputed[j] = recomputed[j] - yi * a
    for j in range(lp.num_vars):
        if abs(recomputed[j] - r[j]) > tol:
            return False

    # dual sign conditions and row complementary slackness
    for i, row in enumerate(lp.rows):
        lhs = sum(a * x[j] for j, a in row.coeffs)
        slack = row.rhs - lhs
        if row.relation == "<=" and y[i] > tol:
            return False
        if row.relation == ">=" and y[i] < -tol:
            return False
        if row.relation != "=" and abs(y[i]) > tol and abs(slack) > tol:
            return False

    # variable sign conditions
    for j in range(lp.num_vars):
        lo, up = lp.lower[j], lp.upper[j]
        at_lo = lo is not None and abs(x[j] - lo) <= tol
        at_up = up is not None and abs(x[j] - up) <= tol
        if at_lo and at_up:
            continue  # fixed variable: any reduced cost is fine
        if at_lo:
            if r[j] < -tol:
                return False
        elif at_up:
            if r[j] > tol:
                return False
        elif abs(r[j]) > tol:
            return False
    return True
