"""Two-phase bounded-variable simplex on a dense tableau.

Works in either arithmetic mode: exact rational coefficients give exact
vertex solutions (zero tolerances), floats use the package tolerances.
Every row gets a slack column (pinned to zero for equality rows), so the
constraint matrix entering the tableau is [A | I].  Rows whose slack
cannot absorb the initial residual get an artificial column; phase 1
minimizes the sum of artificials, phase 2 the true objective with the
artificials pinned at zero.

Pricing: "dantzig" (largest reduced-cost violation) with an automatic
permanent switch to Bland's rule after a long degenerate streak, or
"bland" throughout.  Both are deterministic; the automatic switch keeps
the exact lane provably finite.

Nonbasic variables sit at a finite bound; entering steps use the bounded
ratio test (a step may simply flip a variable to its opposite bound).
"""

from __future__ import annotations

from ..errors import SolverError
from ..numeric import EPS_PIVOT, Rat, as_float
from .model import LinearProgram, OptResult, SolveStatus

AT_LOWER, AT_UPPER, BASIC = 0, 1, 2

# consecutive degenerate steps tolerated before pricing falls back to Bland
DEGENERATE_STREAK = 40


def _coerce(lp: LinearProgram, exact: bool):
    conv = (lambda v: Rat(v)) if exact else as_float
    obj = [conv(c) for c in lp.objective]
    lower = [None if b is None else conv(b) for b in lp.lower]
    upper = [None if b is None else conv(b) for b in lp.upper]
    rows = [
        ([(j, conv(a)) for j, a in row.coeffs], row.relation, conv(row.rhs))
        for row in lp.rows
    ]
    return obj, lower, upper, rows


class _Tableau:
    def __init__(self, lp: LinearProgram, start_at_upper, exact: bool):
        obj, lower, upper, rows = _coerce(lp, exact)
        self.exact = exact
        self.zero = Rat(0) if exact else 0.0
        self.one = Rat(1) if exact else 1.0
        self.dual_tol = self.zero if exact else 1e-9
        self.pivot_tol = self.zero if exact else EPS_PIVOT
        nv = len(obj)
        m = len(rows)
        self.nv, self.m = nv, m
        self.obj_struct = obj

        self.lower = list(lower)
        self.upper = list(upper)
        for j in range(nv):
            if self.lower[j] is None and self.upper[j] is None:
                raise SolverError("free variables are not supported")
            if (
                self.lower[j] is not None
                and self.upper[j] is not None
                and self.lower[j] > self.upper[j]
            ):
                self.infeasible_bounds = True
                return
        self.infeasible_bounds = False

        # slack bounds by relation
        for coeffs, rel, rhs in rows:
            if rel == "<=":
                self.lower.append(self.zero)
                self.upper.append(None)
            elif rel == ">=":
                self.lower.append(None)
                self.upper.append(self.zero)
            else:
                self.lower.append(self.zero)
                self.upper.append(self.zero)

        # crash values for structural nonbasics
        self.vstat = []
        val = []
        for j in range(nv):
            if (
                j in start_at_upper
                and self.upper[j] is not None
            ) or self.lower[j] is None:
                self.vstat.append(AT_UPPER)
                val.append(self.upper[j])
            else:
                self.vstat.append(AT_LOWER)
                val.append(self.lower[j])
        self.val = val  # structural nonbasic crash values (index < nv)

        # residual slack values decide which rows need artificials
        self.basis = []
        self.rhs = []
        art_rows = []
        slack_sigma = {}
        for i, (coeffs, rel, rhs) in enumerate(rows):
            s_val = rhs - sum(a * val[j] for j, a in coeffs)
            lo_s, up_s = self.lower[nv + i], self.upper[nv + i]
            if (lo_s is None or s_val >= lo_s) and (up_s is None or s_val <= up_s):
                self.basis.append(nv + i)
                self.rhs.append(s_val)
                self.vstat.append(BASIC)
            else:
                pin = lo_s if (lo_s is not None and s_val < lo_s) else up_s
                resid = s_val - pin
                sigma = self.one if resid > 0 else -self.one
                art_rows.append((i, sigma))
                slack_sigma[i] = (pin, resid, sigma)
                self.vstat.append(AT_LOWER if pin == lo_s else AT_UPPER)
                self.basis.append(None)  # artificial goes here
                self.rhs.append(resid if resid > 0 else -resid)

        self.n_art = len(art_rows)
        ncols = nv + m + self.n_art
        self.ncols = ncols

        # dense tableau [A | I | sigma e_i]
        tab = []
        for i, (coeffs, rel, rhs) in enumerate(rows):
            row = [self.zero] * ncols
            for j, a in coeffs:
                row[j] = a
            row[nv + i] = self.one
            tab.append(row)
        self.art_cols = []
        for k, (i, sigma) in enumerate(art_rows):
            col = nv + m + k
            if sigma < 0:
                # keep the tableau equal to B^-1 A: the artificial basis
                # column is -e_i, so the row flips sign
                tab[i] = [-v for v in tab[i]]
            tab[i][col] = self.one
            self.basis[i] = col
            self.art_cols.append(col)
            self.lower.append(self.zero)
            self.upper.append(None)
            self.vstat.append(BASIC)
        self.tab = tab
        # nonbasic slack pin values get folded into self.val lazily via bounds
        self.iterations = 0

    # -- helpers ----------------------------------------------------------

    def nonbasic_value(self, j):
        if self.vstat[j] == AT_LOWER:
            return self.lower[j]
        return self.upper[j]

    def pinned(self, j) -> bool:
        return (
            self.lower[j] is not None
            and self.upper[j] is not None
            and self.lower[j] == self.upper[j]
        )

    def cost_row(self, cost):
        """Reduced costs z_j = c_j - c_B . (B^-1 A_j), computed fresh."""
        z = list(cost)
        for i in range(self.m):
            cb = cost[self.basis[i]]
            if cb:
                row = self.tab[i]
                for k in range(self.ncols):
                    if row[k]:
                        z[k] = z[k] - cb * row[k]
        return z

    # -- core loop ---------------------------------------------------------

    def run(self, cost, z, pricing: str, limit: int) -> str:
        """Iterate to optimality for the given cost vector.  Returns status."""
        streak = 0
        bland = pricing == "bland"
        while True:
            if self.iterations >= limit:
                return "iteration_limit"
            q = self._entering(z, bland)
            if q is None:
                return "optimal"
            sigma = self.one if self.vstat[q] == AT_LOWER else -self.one
            t, leave, flip = self._ratio(q, sigma, bland)
            if t is None:
                return "unbounded"
            self.iterations += 1
            degenerate = t == 0 if self.exact else abs(t) <= 1e-12
            streak = streak + 1 if degenerate else 0
            if not bland and streak > DEGENERATE_STREAK:
                bland = True
            if flip:
                self._bound_flip(q, sigma, t)
            else:
                self._pivot(q, leave, sigma, t, cost, z)

    def _entering(self, z, bland):
        best = None
        best_score = self.dual_tol
        for j in range(self.ncols):
            st = self.vstat[j]
            if st == BASIC or self.pinned(j):
                continue
            zj = z[j]
            if st == AT_LOWER:
                score = -zj
            else:
                score = zj
            if score > best_score:
                if bland:
                    return j
                best = j
                best_score = score
        return best

    def _ratio(self, q, sigma, bland):
        """Bounded ratio test.  Returns (t, leaving_row, is_bound_flip)."""
        best_t = None
        leave = None
        if self.lower[q] is not None and self.upper[q] is not None:
            best_t = self.upper[q] - self.lower[q]
        best_a = self.zero
        for i in range(self.m):
            a = self.tab[i][q]
            if a == 0 or (not self.exact and abs(a) <= self.pivot_tol):
                continue
            d = sigma * a
            bi = self.basis[i]
            if d > 0:
                lo = self.lower[bi]
                if lo is None:
                    continue
                t = (self.rhs[i] - lo) / d
            else:
                up = self.upper[bi]
                if up is None:
                    continue
                t = (up - self.rhs[i]) / (-d)
            if t < 0:
                t = self.zero
            if best_t is None or t < best_t:
                best_t, leave, best_a = t, i, a
            elif leave is not None and t == best_t:
                if bland:
                    if bi < self.basis[leave]:
                        leave, best_a = i, a
                elif abs(a) > abs(best_a) or (
                    abs(a) == abs(best_a) and bi < self.basis[leave]
                ):
                    leave, best_a = i, a
        if best_t is None:
            return None, None, False
        return best_t, leave, leave is None

    def _bound_flip(self, q, sigma, t):
        if t != 0:
            step = sigma * t
            for i in range(self.m):
                a = self.tab[i][q]
                if a:
                    self.rhs[i] = self.rhs[i] - a * step
        self.vstat[q] = AT_UPPER if self.vstat[q] == AT_LOWER else AT_LOWER

    def _pivot(self, q, r, sigma, t, cost, z):
        tab = self.tab
        enter_val = self.nonbasic_value(q) + sigma * t
        if t != 0:
            step = sigma * t
            for i in range(self.m):
                if i != r:
                    a = tab[i][q]
                    if a:
                        self.rhs[i] = self.rhs[i] - a * step
        self.rhs[r] = enter_val

        out = self.basis[r]
        d = sigma * tab[r][q]
        self.vstat[out] = AT_LOWER if d > 0 else AT_UPPER
        if self.lower[out] is None:  # leaving toward its only bound
            self.vstat[out] = AT_UPPER
        elif self.upper[out] is None:
            self.vstat[out] = AT_LOWER

        prow = tab[r]
        inv = self.one / prow[q]
        if inv != 1:
            for k in range(self.ncols):
                if prow[k]:
                    prow[k] = prow[k] * inv
        nz = [(k, v) for k, v in enumerate(prow) if v]
        for i in range(self.m):
            if i == r:
                continue
            row = tab[i]
            f = row[q]
            if f:
                for k, v in nz:
                    row[k] = row[k] - f * v
        f = z[q]
        if f:
            for k, v in nz:
                z[k] = z[k] - f * v
        self.basis[r] = q
        self.vstat[q] = BASIC

    # -- solution extraction ------------------------------------------------

    def solution(self):
        x = [None] * self.ncols
        for j in range(self.ncols):
            if self.vstat[j] != BASIC:
                x[j] = self.nonbasic_value(j)
        for i in range(self.m):
            x[self.basis[i]] = self.rhs[i]
        return x


def solve_dense(
    lp: LinearProgram,
    *,
    exact: bool,
    pricing: str = "dantzig",
    iteration_limit: int = 10**6,
    start_at_upper=frozenset(),
    want_duals: bool = False,
) -> OptResult:
    tb = _Tableau(lp, start_at_upper, exact)
    if tb.infeasible_bounds:
        return OptResult(SolveStatus.INFEASIBLE, None, None, 0)

    nv, m = tb.nv, tb.m
    # phase 1
    if tb.n_art:
        cost1 = [tb.zero] * tb.ncols
        for c in tb.art_cols:
            cost1[c] = tb.one
        z = tb.cost_row(cost1)
        status = tb.run(cost1, z, pricing, iteration_limit)
        if status == "iteration_limit":
            return OptResult(SolveStatus.ITERATION_LIMIT, None, None, tb.iterations)
        if status == "unbounded":  # pragma: no cover - phase 1 is bounded below
            raise SolverError("phase 1 reported unbounded")
        x = tb.solution()
        infeas = sum(x[c] for c in tb.art_cols)
        tol = tb.zero if tb.exact else 1e-7
        if infeas > tol:
            return OptResult(SolveStatus.INFEASIBLE, None, None, tb.iterations)
        for c in tb.art_cols:
            tb.upper[c] = tb.zero  # pin
    # phase 2
    cost2 = [tb.zero] * tb.ncols
    for j in range(nv):
        cost2[j] = tb.obj_struct[j]
    z = tb.cost_row(cost2)
    status = tb.run(cost2, z, pricing, iteration_limit)
    if status == "iteration_limit":
        return OptResult(SolveStatus.ITERATION_LIMIT, None, None, tb.iterations)
    if status == "unbounded":
        return OptResult(SolveStatus.UNBOUNDED, None, None, tb.iterations)
    xfull = tb.solution()
    x = tuple(xfull[:nv])
    objective = sum(c * v for c, v in zip(tb.obj_struct, x))
    duals = reduced = None
    if want_duals:
        # slack j has cost 0 and column e_j, so its reduced cost is -y_j
        duals = tuple(-z[nv + i] for i in range(m))
        reduced = tuple(z[:nv])
    return OptResult(
        SolveStatus.OPTIMAL,
        x,
        objective,
        tb.iterations,
        duals=duals,
        reduced_costs=reduced,
    )
