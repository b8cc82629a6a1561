"""The measure preserving construction and its audit report."""

import math

from hypothesis import given

from sdarb import (
    dominates_ssd,
    is_countermonotone,
    market_price,
    new_market,
    ompd,
    ompd_price,
    pushforward,
    same_distribution,
    ssd_lower_bound,
    verify_ompd,
)
from sdarb.numeric import Rat

from conftest import exact_markets


def test_construction_values(market_a, market_b):
    assert ompd(market_a).values == (2, 1)
    assert ompd_price(market_a) == Rat(4, 3)
    assert ompd(market_b).values == (2, 2)
    assert ompd_price(market_b) == 2
    assert ompd_price(market_b) > market_price(market_b)


def test_constant_kernel_gives_identity(flat_market):
    assert ompd(flat_market).values == flat_market.grid
    assert ompd_price(flat_market) == market_price(flat_market)


def test_audit_flags(market_a, flat_market):
    rep = verify_ompd(market_a)
    assert rep.countermonotone
    assert not rep.distribution_preserved
    assert not rep.adequate
    assert rep.price == Rat(4, 3)
    assert rep.lower_bound == Rat(7, 6)
    assert not rep.price_equals_bound

    flat = verify_ompd(flat_market)
    assert flat.adequate and flat.countermonotone
    assert flat.distribution_preserved and flat.price_equals_bound
    assert not flat.near_kernel_ties


def _rank_assignment(m):
    """Independent oracle for uniform objective masses: rank the states
    by kernel descending (ties by state index ascending); the state of
    rank p receives the p-th smallest atom."""
    order = sorted(range(m.n), key=lambda i: (-m.kernel[i], i))
    out = [None] * m.n
    for rank, state in enumerate(order):
        out[state] = m.grid[rank]
    return tuple(out)


@given(exact_markets(adequate=True, n_min=2, n_max=7))
def test_uniform_masses_match_the_rank_oracle(m):
    assert ompd(m).values == _rank_assignment(m)
    rep = verify_ompd(m)
    assert rep.adequate
    assert rep.countermonotone
    assert rep.distribution_preserved
    assert rep.price_equals_bound


@given(exact_markets())
def test_countermonotone_on_every_market(m):
    theta = ompd(m)
    assert is_countermonotone(m, theta, m.kernel)
    rep = verify_ompd(m)
    assert rep.countermonotone
    assert rep.price == ompd_price(m)
    assert rep.lower_bound == ssd_lower_bound(m)


@given(exact_markets())
def test_price_at_least_bound_when_ssd_holds(m):
    theta = ompd(m)
    if dominates_ssd(pushforward(m, theta), m.objective):
        assert ompd_price(m) >= ssd_lower_bound(m)


def test_float_arguments_snap_onto_quantile_levels():
    # accumulated float rounding must not push the construction across a
    # quantile level: uniform float masses are the worst case
    t = 1.0 / 3.0
    m = new_market([1.0, 2.0, 3.0], [t, t, t], [t, t, t])
    assert ompd(m).values == (1.0, 2.0, 3.0)

    n = 7
    mu = [1.0 / n] * n
    kern = [2.0, 1.5, 1.7, 0.9, 1.1, 0.8, 0.7]
    m7 = new_market(
        list(range(1, n + 1)), mu, [k * w for k, w in zip(kern, mu)]
    )
    assert ompd(m7).values == _rank_assignment(m7)
    rep = verify_ompd(m7)
    assert rep.distribution_preserved and rep.price_equals_bound


def test_near_ties_detected_and_widened():
    t = 1.0 / 3.0
    bumped = math.nextafter(1.0, 2.0)
    m = new_market([1.0, 2.0, 3.0], [t, t, t], [1.0 * t, bumped * t, 0.5 * t])
    # exact tie detection keeps the two close kernels distinct
    assert ompd(m).values == (2.0, 1.0, 3.0)
    # widening merges the level set and the construction becomes identity
    assert ompd(m, tie_eps=1e-12).values == (1.0, 2.0, 3.0)
    rep = verify_ompd(m)
    assert rep.near_kernel_ties
    assert verify_ompd(m, tie_eps=1e-12).distribution_preserved


def test_distribution_preserved_is_reported_not_assumed(market_b):
    # on a non-uniform market the construction may merge payoff values
    theta = ompd(market_b)
    assert not same_distribution(
        pushforward(market_b, theta), market_b.objective
    )
