"""Shared fixtures and hypothesis strategies.

``market_a`` and ``market_b`` are the two worked two-atom markets used
throughout: both have unequal objective masses and a nonmonotone kernel,
but only the first admits a first-order improvement.
"""

import os

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from sdarb import DiscreteMeasure, new_market
from sdarb.numeric import Rat

settings.register_profile(
    "sdarb", deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("sdarb")

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")


def data_path(name: str) -> str:
    return os.path.join(DATA_DIR, name)


@pytest.fixture
def market_a():
    # kernel (1/2, 2): increasing, first-order arbitrage exists
    return new_market([1, 2], [Rat(2, 3), Rat(1, 3)], [Rat(1, 3), Rat(2, 3)])


@pytest.fixture
def market_b():
    # kernel (3/5, 6/5): nonmonotone but no first-order arbitrage
    return new_market([1, 2], [Rat(1, 3), Rat(2, 3)], [Rat(1, 5), Rat(4, 5)])


@pytest.fixture
def flat_market():
    # nu = mu on three atoms, kernel identically 1
    third = Rat(1, 3)
    return new_market([1, 2, 3], [third] * 3, [third] * 3)


@st.composite
def exact_measures(draw, n_min=1, n_max=6):
    """Probability measure with integer atoms and small-rational masses."""
    n = draw(st.integers(n_min, n_max))
    atoms = sorted(draw(st.sets(st.integers(0, 20), min_size=n, max_size=n)))
    weights = draw(st.lists(st.integers(1, 9), min_size=n, max_size=n))
    total = sum(weights)
    return DiscreteMeasure.from_pairs(atoms, [Rat(w, total) for w in weights])


@st.composite
def exact_markets(draw, n_min=2, n_max=6, adequate=False):
    """Exact market: integer atoms, rational masses and kernel.

    Roughly a quarter of the draws sort the kernel nonincreasing so the
    no-arbitrage branch of every equivalence gets exercised too.
    """
    n = draw(st.integers(n_min, n_max))
    atoms = sorted(draw(st.sets(st.integers(1, 20), min_size=n, max_size=n)))
    if adequate:
        mu = [Rat(1, n)] * n
    else:
        weights = draw(st.lists(st.integers(1, 9), min_size=n, max_size=n))
        total = sum(weights)
        mu = [Rat(w, total) for w in weights]
    kernel = [
        Rat(draw(st.integers(1, 6)), draw(st.integers(1, 6))) for _ in range(n)
    ]
    if draw(st.sampled_from([True, False, False, False])):
        kernel.sort(reverse=True)
    nu = [k * w for k, w in zip(kernel, mu)]
    return new_market(atoms, mu, nu)
