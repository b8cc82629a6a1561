"""Linear and mixed-integer program containers.

Programs are stored in minimize form with sparse rows and explicit
variable bounds:

    minimize    c . x
    subject to  row_k :  sum_j a_kj x_j  (<= | = | >=)  b_k
                lower_j <= x_j <= upper_j   (upper may be None)

The arithmetic mode follows the numbers: exact rational coefficients are
solved exactly, float coefficients with tolerances.  Solutions are basic
(vertex) solutions produced by a two-phase bounded-variable simplex.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence, Union

from ..errors import SdarbError
from ..numeric import EPS_FEAS, all_exact, number_str

__all__ = [
    "LinearRow",
    "LinearProgram",
    "MixedIntegerProgram",
    "SolveStatus",
    "OptResult",
    "ProgramBuilder",
    "dump_program",
    "constraint_violation",
]

RELATIONS = ("<=", "=", ">=")


@dataclass(frozen=True)
class LinearRow:
    """One constraint: sparse coefficient list, relation, right-hand side."""

    coeffs: tuple  # ((var_index, coefficient), ...) with increasing indices
    relation: str
    rhs: object

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise SdarbError(f"bad relation {self.relation!r}")
        last = -1
        for j, _ in self.coeffs:
            if j <= last:
                raise SdarbError("row indices must be strictly increasing")
            last = j


@dataclass(frozen=True)
class LinearProgram:
    objective: tuple
    rows: tuple
    lower: tuple
    upper: tuple  # entries may be None (unbounded above)
    names: Optional[tuple] = None

    @property
    def num_vars(self) -> int:
        return len(self.objective)

    @property
    def num_rows(self) -> int:
        return len(self.rows)

    @property
    def exact(self) -> bool:
        nums = list(self.objective) + list(self.lower)
        nums += [u for u in self.upper if u is not None]
        for row in self.rows:
            nums.append(row.rhs)
            nums.extend(a for _, a in row.coeffs)
        return all_exact(nums)

    def with_bounds(self, lower: tuple, upper: tuple) -> "LinearProgram":
        return LinearProgram(self.objective, self.rows, lower, upper, self.names)


@dataclass(frozen=True)
class MixedIntegerProgram:
    relaxation: LinearProgram
    integer_vars: tuple  # indices required integral (binaries in this package)


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    ITERATION_LIMIT = "iteration_limit"
    NODE_LIMIT = "node_limit"


@dataclass(frozen=True)
class OptResult:
    """Solver outcome.  ``x``/``objective`` are None unless a solution exists.

    For LPs, ``duals`` holds one multiplier per row and ``reduced_costs``
    one per variable, enabling an independent optimality certificate.
    """

    status: SolveStatus
    x: Optional[tuple]
    objective: object
    iterations: int
    node_count: int = 0
    duals: Optional[tuple] = None
    reduced_costs: Optional[tuple] = None

    @property
    def ok(self) -> bool:
        return self.status is SolveStatus.OPTIMAL


class ProgramBuilder:
    """Incremental construction of LPs / MILPs."""

    def __init__(self):
        self._obj: list = []
        self._lower: list = []
        self._upper: list = []
        self._names: list = []
        self._rows: list = []
        self._integers: list = []

    def add_var(self, name: str = "", lower=0, upper=None, objective=0,
                integer: bool = False) -> int:
        j = len(self._obj)
        self._obj.append(objective)
        self._lower.append(lower)
        self._upper.append(upper)
        self._names.append(name or f"x{j}")
        if integer:
            self._integers.append(j)
        return j

    def add_row(self, coeffs: Union[dict, Sequence], relation: str, rhs) -> int:
        if isinstance(coeffs, dict):
            items = sorted(coeffs.items())
        else:
            items = sorted(coeffs)
        items = [(j, a) for j, a in items if a != 0]
        self._rows.append(LinearRow(tuple(items), relation, rhs))
        return len(self._rows) - 1

    def build_lp(self) -> LinearProgram:
        return LinearProgram(
            tuple(self._obj),
            tuple(self._rows),
            tuple(self._lower),
            tuple(self._upper),
            tuple(self._names),
        )

    def build_milp(self) -> MixedIntegerProgram:
        return MixedIntegerProgram(self.build_lp(), tuple(self._integers))


def constraint_violation(lp: LinearProgram, x: Sequence) -> object:
    """Largest violation of any row or bound at ``x`` (0 when feasible)."""
    worst = 0
    for j, v in enumerate(x):
        if lp.lower[j] is not None and lp.lower[j] - v > worst:
            worst = lp.lower[j] - v
        if lp.upper[j] is not None and v - lp.upper[j] > worst:
            worst = v - lp.upper[j]
    for row in lp.rows:
        lhs = sum(a * x[j] for j, a in row.coeffs)
        if row.relation == "<=":
            gap = lhs - row.rhs
        elif row.relation == ">=":
            gap = row.rhs - lhs
        else:
            gap = abs(lhs - row.rhs)
        if gap > worst:
            worst = gap
    return worst


def is_feasible(lp: LinearProgram, x: Sequence, eps: float = EPS_FEAS) -> bool:
    tol = 0 if lp.exact and all_exact(x) else eps
    return constraint_violation(lp, x) <= tol


def dump_program(prog: Union[LinearProgram, MixedIntegerProgram]) -> str:
    """Plain-text rendering for debugging."""
    integers: tuple = ()
    if isinstance(prog, MixedIntegerProgram):
        lp = prog.relaxation
        integers = prog.integer_vars
    else:
        lp = prog
    names = lp.names or tuple(f"x{j}" for j in range(lp.num_vars))
    out = []
    obj = " + ".join(
        f"{number_str(c)}*{names[j]}" for j, c in enumerate(lp.objective) if c != 0
    )
    out.append(f"minimize {obj or '0'}")
    out.append("subject to")
    for k, row in enumerate(lp.rows):
        lhs = " + ".join(f"{number_str(a)}*{names[j]}" for j, a in row.coeffs)
        out.append(f"  r{k}: {lhs or '0'} {row.relation} {number_str(row.rhs)}")
    out.append("bounds")
    for j in range(lp.num_vars):
        lo = number_str(lp.lower[j]) if lp.lower[j] is not None else "-inf"
        hi = number_str(lp.upper[j]) if lp.upper[j] is not None else "+inf"
        tag = " integer" if j in set(integers) else ""
        out.append(f"  {lo} <= {names[j]} <= {hi}{tag}")
    return "\n".join(out) + "\n"
