"""Decision procedures for the four distribution orders."""

import pytest
from hypothesis import given

from sdarb import (
    DiscreteMeasure,
    OrderRelation,
    UnknownMethod,
    dominates,
    dominates_cv,
    dominates_fsd,
    dominates_ssd,
    expected_shortfall,
    new_market,
    pushforward,
    same_distribution,
)
from sdarb.numeric import Rat
from sdarb.orders import SSD_METHODS

from conftest import exact_measures


def test_order_relation_parse():
    assert OrderRelation.parse("eq") is OrderRelation.EQUAL
    assert OrderRelation.parse("fsd") is OrderRelation.FIRST_ORDER
    assert OrderRelation.parse("cv") is OrderRelation.CONCAVE
    assert OrderRelation.parse("ssd") is OrderRelation.SECOND_ORDER
    with pytest.raises(UnknownMethod):
        OrderRelation.parse("third")


def test_same_distribution(market_a):
    swapped = pushforward(market_a, (2, 1))
    assert not same_distribution(swapped, market_a.objective)
    assert same_distribution(market_a.objective, market_a.objective)


def test_same_distribution_under_equal_mass_swap():
    half = Rat(1, 2)
    m = new_market([1, 2], [half, half], [half, half])
    assert same_distribution(pushforward(m, (2, 1)), m.objective)


def test_fsd(market_b):
    lifted = pushforward(market_b, (2, 2))
    assert dominates_fsd(lifted, market_b.objective)
    assert not dominates_fsd(market_b.objective, lifted)
    assert dominates_fsd(lifted, lifted)


def test_ssd(market_a):
    d = pushforward(market_a, (Rat(3, 2), 1))
    for method in SSD_METHODS:
        assert dominates_ssd(d, market_a.objective, method=method)
        assert dominates_ssd(d, d, method=method)
    low = DiscreteMeasure.from_pairs([1], [1])
    high = DiscreteMeasure.from_pairs([2], [1])
    assert not dominates_ssd(low, high)
    assert dominates_ssd(high, low)
    with pytest.raises(UnknownMethod):
        dominates_ssd(low, high, method="midpoint")


def test_cv(market_a, market_b):
    d = pushforward(market_a, (Rat(3, 2), 1))
    # mean 4/3 matches the objective mean, spread is tighter
    assert dominates_cv(d, market_a.objective)
    lifted = pushforward(market_b, (2, 2))
    assert not dominates_cv(lifted, market_b.objective)
    assert dominates_cv(lifted, lifted)


def test_dominates_dispatch(market_a):
    d = pushforward(market_a, (Rat(3, 2), 1))
    mu = market_a.objective
    assert dominates(d, mu, OrderRelation.SECOND_ORDER)
    assert dominates(d, mu, OrderRelation.CONCAVE)
    assert not dominates(d, mu, OrderRelation.FIRST_ORDER)
    assert not dominates(d, mu, OrderRelation.EQUAL)


def test_expected_shortfall():
    d = DiscreteMeasure.from_pairs([5], [1])
    assert expected_shortfall(d, 7) == 2
    assert expected_shortfall(d, 5) == 0
    assert expected_shortfall(d, 1) == 0
    pair = DiscreteMeasure.from_pairs([1, 3], [Rat(1, 2), Rat(1, 2)])
    assert expected_shortfall(pair, 2) == Rat(1, 2)


@given(exact_measures())
def test_shift_up_dominates(d):
    lifted = DiscreteMeasure(tuple(a + 1 for a in d.atoms), d.masses, d.exact)
    assert dominates_fsd(lifted, d)
    assert dominates_ssd(lifted, d)
    assert not dominates_cv(lifted, d)  # means differ by 1


@given(exact_measures(), exact_measures())
def test_implication_chain(d1, d2):
    if same_distribution(d1, d2):
        assert dominates_fsd(d1, d2)
    if dominates_fsd(d1, d2):
        assert dominates_ssd(d1, d2)
    if dominates_cv(d1, d2):
        assert dominates_ssd(d1, d2)


@given(exact_measures(), exact_measures())
def test_ssd_methods_agree(d1, d2):
    verdicts = {dominates_ssd(d1, d2, method=meth) for meth in SSD_METHODS}
    assert len(verdicts) == 1


@given(exact_measures(), exact_measures())
def test_fsd_antisymmetry(d1, d2):
    if dominates_fsd(d1, d2) and dominates_fsd(d2, d1):
        assert same_distribution(d1, d2)


@given(exact_measures())
def test_mean_preserving_contraction_dominates(d):
    center = DiscreteMeasure.from_pairs([d.mean()], [1])
    assert dominates_ssd(center, d)
    assert dominates_cv(center, d)
