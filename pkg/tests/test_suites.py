"""Randomized property suites: small smoke runs and plumbing.

Full-size runs live in the acceptance tests; here the suites run with
reduced trial counts so failures localize quickly.
"""

import random

import pytest

from sdarb import UnknownMethod, is_adequate
from sdarb.suites import (
    SUITES,
    SuiteResult,
    random_market,
    run_lemmas,
    run_prop1,
    run_prop2,
    run_suite,
)

LEMMAS = {"inverse", "pit", "ssd_criteria", "majorization", "rearrangement"}


def test_prop1_smoke():
    res = run_prop1(40, seed=123)
    assert res.passed
    assert res.trials == 40 and not res.failures
    assert res.detail["with_arbitrage"] > 0
    assert res.elapsed > 0


def test_prop1_deterministic():
    a = run_prop1(15, seed=9)
    b = run_prop1(15, seed=9)
    assert a.detail == b.detail and a.failures == b.failures


def test_prop2_smoke():
    res = run_prop2(10, seed=456)
    assert res.passed
    assert res.trials == 10
    assert res.detail["permutation_cross_checks"] > 0


def test_lemmas_smoke():
    res = run_lemmas(40, seed=789)
    assert res.passed
    assert res.trials == 200  # five families, forty instances each
    assert res.detail["instances_per_lemma"] == 40
    assert set(res.detail["passed"]) == LEMMAS
    assert all(count == 40 for count in res.detail["passed"].values())


def test_run_suite_dispatch():
    assert set(SUITES) == {"prop1", "prop2", "lemmas"}
    res = run_suite("prop1", 5, 3)
    assert res.name == "prop1" and res.trials == 5
    res = run_suite("lemmas", 10, 1)
    assert res.detail["instances_per_lemma"] == 10
    with pytest.raises(UnknownMethod):
        run_suite("prop3")


def test_suite_result_json():
    res = SuiteResult(
        name="prop1", trials=3, failures=[{"seed": 5}], elapsed=0.5,
        detail={"with_arbitrage": 1},
    )
    assert not res.passed
    obj = res.to_json()
    assert set(obj) == {
        "suite", "trials", "failures", "passed", "elapsed_seconds", "detail",
    }
    assert obj["suite"] == "prop1" and obj["passed"] is False
    assert obj["failures"] == [{"seed": 5}]


def test_random_market_shapes():
    rng = random.Random(0)
    seen_n = set()
    for _ in range(200):
        m = random_market(rng, n_min=2, n_max=8)
        seen_n.add(m.n)
        assert 2 <= m.n <= 8
        assert m.exact
        assert all(a < b for a, b in zip(m.grid, m.grid[1:]))
        assert all(1 <= x <= 12 for x in m.grid)
        assert all(k > 0 for k in m.kernel)
    assert seen_n == set(range(2, 9))


def test_random_market_adequate_flag():
    rng = random.Random(1)
    for _ in range(50):
        m = random_market(rng, adequate=True, n_min=2, n_max=6)
        assert is_adequate(m)
        assert len(set(m.mu)) == 1
