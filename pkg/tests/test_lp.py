"""Simplex and branch-and-bound behaviour, cross-checked against scipy."""

import random
from itertools import permutations, product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from sdarb.errors import SolverError
from sdarb.lp import (
    ProgramBuilder,
    SolveStatus,
    certify_optimal,
    constraint_violation,
    convert_mode,
    dump_program,
    is_feasible,
    solve_lp,
    solve_milp,
)
from sdarb.numeric import Rat


def test_single_variable_floor():
    b = ProgramBuilder()
    x = b.add_var("x", objective=1)
    b.add_row({x: 1}, ">=", 3)
    res = solve_lp(b.build_lp())
    assert res.ok
    assert res.x == (3,)
    assert res.objective == 3


def test_two_variables_with_equality():
    b = ProgramBuilder()
    x = b.add_var("x", objective=1)
    y = b.add_var("y", objective=1)
    b.add_row({x: 1, y: 1}, ">=", 2)
    b.add_row({x: 1, y: -1}, "=", 0)
    res = solve_lp(b.build_lp())
    assert res.ok
    assert res.x == (1, 1)
    assert res.objective == 2


def test_infeasible():
    b = ProgramBuilder()
    x = b.add_var("x", objective=1)
    b.add_row({x: 1}, ">=", 2)
    b.add_row({x: 1}, "<=", 1)
    assert solve_lp(b.build_lp()).status is SolveStatus.INFEASIBLE


def test_unbounded():
    b = ProgramBuilder()
    x = b.add_var("x", objective=-1)
    b.add_row({x: 1}, ">=", 0)
    assert solve_lp(b.build_lp()).status is SolveStatus.UNBOUNDED


def test_iteration_limit_surfaces_as_status():
    b = ProgramBuilder()
    x = b.add_var("x", objective=1)
    b.add_row({x: 1}, ">=", 3)
    res = solve_lp(b.build_lp(), iteration_limit=0)
    assert res.status is SolveStatus.ITERATION_LIMIT


def test_hand_written_shortfall_program():
    # two payoff variables, shortfall caps at both grid thresholds; the
    # optimum sits at theta = (3/2, 1) with value 7/6
    b = ProgramBuilder()
    t1 = b.add_var("theta1", lower=0, upper=2, objective=Rat(1, 3))
    t2 = b.add_var("theta2", lower=0, upper=2, objective=Rat(2, 3))
    s = [b.add_var(f"s{k}", lower=0) for k in range(4)]
    b.add_row({t1: 1, s[0]: 1}, ">=", 1)
    b.add_row({t2: 1, s[1]: 1}, ">=", 1)
    b.add_row({s[0]: Rat(2, 3), s[1]: Rat(1, 3)}, "<=", 0)
    b.add_row({t1: 1, s[2]: 1}, ">=", 2)
    b.add_row({t2: 1, s[3]: 1}, ">=", 2)
    b.add_row({s[2]: Rat(2, 3), s[3]: Rat(1, 3)}, "<=", Rat(2, 3))
    res = solve_lp(b.build_lp())
    assert res.ok
    assert res.objective == Rat(7, 6)
    assert res.x[:2] == (Rat(3, 2), 1)


def test_optimality_certificate():
    b = ProgramBuilder()
    x = b.add_var("x", objective=2)
    y = b.add_var("y", objective=3)
    b.add_row({x: 1, y: 1}, ">=", 4)
    b.add_row({x: 1}, "<=", 3)
    lp = b.build_lp()
    res = solve_lp(lp, want_duals=True)
    assert res.ok and res.objective == 9
    assert certify_optimal(lp, res)
    assert is_feasible(lp, res.x)
    with pytest.raises(SolverError):
        certify_optimal(lp, solve_lp(lp))  # no duals requested


def test_degenerate_cycling_program_terminates():
    # the classic cycling instance; anti-cycling pricing must reach -1/20
    b = ProgramBuilder()
    x1 = b.add_var("x1", objective=Rat(-3, 4))
    x2 = b.add_var("x2", objective=150)
    x3 = b.add_var("x3", objective=Rat(-1, 50))
    x4 = b.add_var("x4", objective=6)
    b.add_row({x1: Rat(1, 4), x2: -60, x3: Rat(-1, 25), x4: 9}, "<=", 0)
    b.add_row({x1: Rat(1, 2), x2: -90, x3: Rat(-1, 50), x4: 3}, "<=", 0)
    b.add_row({x3: 1}, "<=", 1)
    lp = b.build_lp()
    for pricing in ("dantzig", "bland"):
        res = solve_lp(lp, pricing=pricing)
        assert res.ok
        assert res.objective == Rat(-1, 20)


def _random_covering_lp(n_vars, n_rows, seed):
    rng = random.Random(seed)
    b = ProgramBuilder()
    for j in range(n_vars):
        b.add_var(
            f"x{j}", lower=0, upper=10,
            objective=Rat(rng.randint(1, 9), rng.randint(1, 4)),
        )
    for _ in range(n_rows):
        picks = rng.sample(range(n_vars), rng.randint(2, min(6, n_vars)))
        b.add_row({j: Rat(rng.randint(1, 5)) for j in picks}, ">=",
                  rng.randint(1, 12))
    return b.build_lp()


def _scipy_value(lp):
    c = [float(v) for v in lp.objective]
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for row in lp.rows:
        dense = [0.0] * lp.num_vars
        for j, a in row.coeffs:
            dense[j] = float(a)
        if row.relation == "<=":
            a_ub.append(dense)
            b_ub.append(float(row.rhs))
        elif row.relation == ">=":
            a_ub.append([-v for v in dense])
            b_ub.append(-float(row.rhs))
        else:
            a_eq.append(dense)
            b_eq.append(float(row.rhs))
    bounds = [
        (None if lo is None else float(lo), None if hi is None else float(hi))
        for lo, hi in zip(lp.lower, lp.upper)
    ]
    res = linprog(
        c, A_ub=a_ub or None, b_ub=b_ub or None, A_eq=a_eq or None,
        b_eq=b_eq or None, bounds=bounds, method="highs",
    )
    assert res.status == 0
    return res.fun


@pytest.mark.parametrize("seed", range(8))
def test_exact_float_and_scipy_agree_small(seed):
    lp = _random_covering_lp(8, 20, seed)
    exact = solve_lp(lp, mode="rational")
    approx = solve_lp(lp, mode="float")
    assert exact.ok and approx.ok
    assert abs(float(exact.objective) - approx.objective) <= 1e-7
    assert abs(_scipy_value(lp) - float(exact.objective)) <= 1e-6


def test_exact_float_and_scipy_agree_revised_lane():
    # enough rows to push the float solve into the revised lane
    lp = _random_covering_lp(40, 170, 99)
    exact = solve_lp(lp, mode="rational")
    approx = solve_lp(lp, mode="float")
    assert exact.ok and approx.ok
    assert abs(float(exact.objective) - approx.objective) <= 1e-7
    assert abs(_scipy_value(lp) - approx.objective) <= 1e-6


def test_convert_mode_round_trip():
    lp = _random_covering_lp(4, 6, 3)
    as_float = convert_mode(lp, exact=False)
    assert not as_float.exact
    back = convert_mode(as_float, exact=True)
    assert back.exact
    assert solve_lp(back).objective == solve_lp(lp).objective


def test_binary_floor_milp():
    b = ProgramBuilder()
    x = b.add_var("x", lower=0, upper=1, objective=1, integer=True)
    b.add_row({x: 1}, ">=", Rat(3, 10))
    res = solve_milp(b.build_milp())
    assert res.ok
    assert res.x == (1,)
    assert res.objective == 1


def test_branch_and_bound_on_fractional_root():
    # LP optimum (2/3, 2/3) is fractional; integer optimum picks one of them
    b = ProgramBuilder()
    x = b.add_var("x", 0, 1, objective=-1, integer=True)
    y = b.add_var("y", 0, 1, objective=-1, integer=True)
    b.add_row({x: 1, y: 2}, "<=", 2)
    b.add_row({x: 2, y: 1}, "<=", 2)
    res = solve_milp(b.build_milp())
    assert res.ok
    assert res.objective == -1
    assert res.node_count > 1


def test_node_limit_surfaces_as_status():
    b = ProgramBuilder()
    x = b.add_var("x", 0, 1, objective=-1, integer=True)
    y = b.add_var("y", 0, 1, objective=-1, integer=True)
    b.add_row({x: 1, y: 2}, "<=", 2)
    b.add_row({x: 2, y: 1}, "<=", 2)
    res = solve_milp(b.build_milp(), node_limit=1)
    assert res.status is SolveStatus.NODE_LIMIT


def test_assignment_milp_matches_permutation_enumeration():
    rng = random.Random(4)
    for _ in range(5):
        cost = [[rng.randint(0, 9) for _ in range(3)] for _ in range(3)]
        b = ProgramBuilder()
        v = {}
        for i in range(3):
            for k in range(3):
                v[i, k] = b.add_var(
                    f"a{i}{k}", 0, 1, objective=cost[i][k], integer=True
                )
        for i in range(3):
            b.add_row({v[i, k]: 1 for k in range(3)}, "=", 1)
        for k in range(3):
            b.add_row({v[i, k]: 1 for i in range(3)}, "=", 1)
        res = solve_milp(b.build_milp())
        best = min(
            sum(cost[i][p[i]] for i in range(3))
            for p in permutations(range(3))
        )
        assert res.ok
        assert res.objective == best
        # the assignment polytope is integral: no branching required
        assert res.node_count == 1


@given(st.data())
@settings(max_examples=60)
def test_milp_matches_exhaustive_enumeration(data):
    n = data.draw(st.integers(2, 4))
    b = ProgramBuilder()
    for j in range(n):
        b.add_var(
            f"b{j}", 0, 1, objective=Rat(data.draw(st.integers(-5, 5))),
            integer=True,
        )
    for _ in range(data.draw(st.integers(1, 3))):
        coeffs = {j: Rat(data.draw(st.integers(-3, 3))) for j in range(n)}
        rel = data.draw(st.sampled_from(["<=", ">="]))
        b.add_row(coeffs, rel, Rat(data.draw(st.integers(-3, 6))))
    mip = b.build_milp()
    res = solve_milp(mip)
    relax = solve_lp(mip.relaxation)

    best = None
    for bits in product((0, 1), repeat=n):
        if constraint_violation(mip.relaxation, bits) <= 0:
            val = sum(
                c * v for c, v in zip(mip.relaxation.objective, bits)
            )
            if best is None or val < best:
                best = val
    if best is None:
        assert res.status is SolveStatus.INFEASIBLE
    else:
        assert res.ok
        assert res.objective == best
        assert relax.objective <= res.objective


def test_dump_program_renders_exact_numbers():
    b = ProgramBuilder()
    x = b.add_var("x", lower=0, upper=Rat(3, 2), objective=Rat(2, 3),
                  integer=True)
    b.add_row({x: 1}, ">=", Rat(1, 2))
    text = dump_program(b.build_milp())
    assert "minimize 2/3*x" in text
    assert "1/2" in text
    assert "3/2" in text
    assert "integer" in text
