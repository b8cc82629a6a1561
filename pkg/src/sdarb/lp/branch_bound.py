"""Branch and bound for mixed-integer programs with binary variables.

Node selection is best-bound with depth-first tie-breaking (then
insertion order).  Branching fixes the most fractional binary (ties to
the lowest index) to 0 in one child and 1 in the other.  An optional
feasible incumbent seeds the pruning bound.  All choices are
deterministic.
"""

from __future__ import annotations

import heapq
from typing import Callable, Optional, Sequence

from ..errors import SolverError
from .model import (
    LinearProgram,
    MixedIntegerProgram,
    OptResult,
    SolveStatus,
    is_feasible,
)

INT_TOL = 1e-7


def _apply_fixes(lp: LinearProgram, fixes: dict) -> LinearProgram:
    if not fixes:
        return lp
    lower = list(lp.lower)
    upper = list(lp.upper)
    for j, v in fixes.items():
        lower[j] = v
        upper[j] = v
    return lp.with_bounds(tuple(lower), tuple(upper))


def _is_integral(v, exact: bool) -> bool:
    if exact:
        return v == 0 or v == 1
    return min(abs(v), abs(1 - v)) <= INT_TOL


def _fractional(x, integer_vars, exact: bool):
    """Index of the most fractional binary (ties low), or None."""
    best = None
    best_frac = 0
    for j in integer_vars:
        v = x[j]
        if _is_integral(v, exact):
            continue
        frac = min(v - 0, 1 - v) if 0 <= v <= 1 else 0
        if exact and best is None:
            return j  # exact fractions do not rank cheaply; take the first
        if frac > best_frac:
            best, best_frac = j, frac
    return best


def _objective(lp: LinearProgram, x) -> object:
    return sum(c * v for c, v in zip(lp.objective, x))


def solve_milp(
    mip: MixedIntegerProgram,
    lp_solve: Callable[[LinearProgram], OptResult],
    *,
    exact: bool,
    node_limit: int = 10**5,
    iteration_limit: int = 10**6,
    incumbent: Optional[Sequence] = None,
) -> OptResult:
    """Minimize over the mixed-integer feasible set.

    ``lp_solve`` solves one node relaxation; it carries the arithmetic
    mode and crash hints.  ``incumbent`` is an optional feasible
    starting point used for pruning.
    """
    base = mip.relaxation
    gap_tol = 0 if exact else 1e-9
    int_vars = mip.integer_vars

    best_x = None
    best_obj = None

    def integral(x) -> bool:
        return all(_is_integral(x[j], exact) for j in int_vars)

    def consider(x) -> bool:
        """Adopt x as incumbent when feasible, integral and better."""
        nonlocal best_x, best_obj
        if x is None:
            return False
        x = tuple(x)
        if not integral(x) or not is_feasible(base, x):
            return False
        val = _objective(base, x)
        if best_obj is None or val < best_obj:
            best_x, best_obj = x, val
            return True
        return False

    if incumbent is not None:
        consider(incumbent)

    nodes = 1
    iterations = 0

    root = lp_solve(base)
    iterations += root.iterations
    if root.status is SolveStatus.UNBOUNDED:
        return OptResult(SolveStatus.UNBOUNDED, None, None, iterations, node_count=nodes)
    if root.status is SolveStatus.ITERATION_LIMIT:
        return OptResult(
            SolveStatus.ITERATION_LIMIT, best_x, best_obj, iterations, node_count=nodes
        )
    if root.status is not SolveStatus.OPTIMAL:
        if best_x is not None:
            return OptResult(SolveStatus.OPTIMAL, best_x, best_obj, iterations, node_count=nodes)
        return OptResult(SolveStatus.INFEASIBLE, None, None, iterations, node_count=nodes)

    if integral(root.x):
        consider(root.x)
        return OptResult(SolveStatus.OPTIMAL, best_x, best_obj, iterations, node_count=nodes)
    if best_obj is not None and root.objective >= best_obj - gap_tol:
        return OptResult(SolveStatus.OPTIMAL, best_x, best_obj, iterations, node_count=nodes)

    def children(res_x):
        """Pairs of fix-dicts for the two children of a fractional point."""
        j = _fractional(res_x, int_vars, exact)
        if j is None:
            raise SolverError("branching requested on an integral point")
        return {j: 0}, {j: 1}

    seq = 0
    heap = []  # (bound, -depth, seq, fixes)

    def push(bound, depth, fixes):
        nonlocal seq
        heapq.heappush(heap, (bound, -depth, seq, fixes))
        seq += 1

    for child in children(root.x):
        push(root.objective, 1, child)

    while heap:
        bound, negdepth, _, fixes = heapq.heappop(heap)
        if best_obj is not None and bound >= best_obj - gap_tol:
            continue  # pruned by a bound established after insertion
        if nodes >= node_limit:
            return OptResult(
                SolveStatus.NODE_LIMIT, best_x, best_obj, iterations, node_count=nodes
            )
        nodes += 1
        res = lp_solve(_apply_fixes(base, fixes))
        iterations += res.iterations
        if res.status is SolveStatus.ITERATION_LIMIT:
            return OptResult(
                SolveStatus.ITERATION_LIMIT, best_x, best_obj, iterations, node_count=nodes
            )
        if res.status is SolveStatus.UNBOUNDED:
            raise SolverError("child node unbounded though root was bounded")
        if res.status is not SolveStatus.OPTIMAL:
            continue  # infeasible node
        if best_obj is not None and res.objective >= best_obj - gap_tol:
            continue
        if integral(res.x):
            consider(res.x)
            continue
        for child in children(res.x):
            merged = dict(fixes)
            merged.update(child)
            push(res.objective, -negdepth + 1, merged)

    if best_x is None:
        return OptResult(SolveStatus.INFEASIBLE, None, None, iterations, node_count=nodes)
    return OptResult(
        SolveStatus.OPTIMAL, best_x, best_obj, iterations, node_count=nodes
    )
