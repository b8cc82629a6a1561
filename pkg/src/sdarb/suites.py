"""Randomized property suites.

Each suite draws seeded random markets (small grids, small-rational
masses and kernels, so exact arithmetic stays fast), checks one family
of properties and reports a summary.  Suites are deterministic given
``(seed, trials)``.

* prop1: on any market, concave-order arbitrage, second-order arbitrage
  and kernel non-monotonicity are all equivalent.
* prop2: on uniform-objective markets, arbitrage in all four senses and
  kernel non-monotonicity are equivalent; the four minimum prices, the
  measure-preserving construction's price and the anti-aligned quantile
  integral all agree; small instances are cross-checked against brute
  permutation enumeration; the distribution-equality program solves at
  the root node.
* lemmas: the five analytic facts the theory rests on, as executable
  checks on random discrete data (generalized inverses, probability
  integral transform, equivalence of the three second-order criteria,
  weighted quantile majorization, rearrangement bounds with their
  equality cases).
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import permutations

from .arbitrage import check_prop1, check_prop2, min_price
from .errors import UnknownMethod
from .measures import (
    DiscreteMeasure,
    MarketModel,
    StepFunction,
    cdf,
    is_kernel_monotone,
    market_price,
    new_market,
    price,
    pushforward,
    quantile,
)
from .numeric import Rat
from .ompd import verify_ompd
from .orders import OrderRelation, dominates_ssd, expected_shortfall
from .rearrange import (
    hardy_littlewood_bounds,
    hardy_majorization_holds,
    is_comonotone,
    is_countermonotone,
    quantile_product_integral,
)

__all__ = [
    "SuiteResult",
    "random_market",
    "random_measure",
    "run_prop1",
    "run_prop2",
    "run_lemmas",
    "run_suite",
    "SUITES",
]


@dataclass
class SuiteResult:
    name: str
    trials: int
    failures: list = field(default_factory=list)
    elapsed: float = 0.0
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_json(self) -> dict:
        return {
            "suite": self.name,
            "trials": self.trials,
            "failures": self.failures,
            "passed": self.passed,
            "elapsed_seconds": round(self.elapsed, 3),
            "detail": self.detail,
        }


def random_market(
    rng: random.Random, *, adequate: bool = False, n_min: int = 2, n_max: int = 8
) -> MarketModel:
    """Random exact market: integer atoms, rational masses and kernel.

    With probability ~0.3 the kernel is sorted nonincreasing so both
    branches of the equivalences get exercised.
    """
    n = rng.randint(n_min, n_max)
    atoms = sorted(rng.sample(range(1, 13), n))
    if adequate:
        mu = [Rat(1, n)] * n
    else:
        weights = [rng.randint(1, 9) for _ in range(n)]
        total = sum(weights)
        mu = [Rat(w, total) for w in weights]
    kernel = [Rat(rng.randint(1, 6), rng.randint(1, 6)) for _ in range(n)]
    if rng.random() < 0.3:
        kernel.sort(reverse=True)
    nu = [k * w for k, w in zip(kernel, mu)]
    return new_market(atoms, mu, nu)


def random_measure(rng: random.Random, *, n_min: int = 1, n_max: int = 6) -> DiscreteMeasure:
    n = rng.randint(n_min, n_max)
    atoms = sorted(rng.sample(range(0, 15), n))
    weights = [rng.randint(1, 9) for _ in range(n)]
    total = sum(weights)
    return DiscreteMeasure.from_pairs(atoms, [Rat(w, total) for w in weights])


def _mean(d: DiscreteMeasure):
    return d.mean()


def _spread_once(rng: random.Random, d: DiscreteMeasure) -> DiscreteMeasure:
    """One mean-preserving spread: split some atom's mass to its neighbors."""
    n = len(d.atoms)
    if n == 0:
        return d
    i = rng.randrange(n)
    x = d.atoms[i]
    w = d.masses[i]
    lo = x - rng.randint(1, 3)
    hi = x + rng.randint(1, 3)
    if lo < 0:
        lo = 0
        if lo == x:
            return d
    # move fraction f of mass w from x onto {lo, hi} preserving the mean
    f = Rat(1, rng.randint(2, 5))
    part = w * f
    a = Rat(hi - x, hi - lo) * part  # mass to lo
    b = part - a  # mass to hi
    atoms = {ai: wi for ai, wi in zip(d.atoms, d.masses)}
    atoms[x] = atoms[x] - part
    atoms[lo] = atoms.get(lo, Rat(0)) + a
    atoms[hi] = atoms.get(hi, Rat(0)) + b
    pairs = sorted((ai, wi) for ai, wi in atoms.items() if wi > 0)
    return DiscreteMeasure(
        tuple(a0 for a0, _ in pairs), tuple(w0 for _, w0 in pairs), d.exact
    )


def _ssd_pair(rng: random.Random):
    """A pair (d1, d2) with d1 second-order dominating d2, by construction:
    d2 arises from d1 through mean-preserving spreads, then d1 may be
    shifted up (first-order improvement)."""
    d1 = random_measure(rng, n_min=2, n_max=5)
    d2 = d1
    for _ in range(rng.randint(1, 3)):
        d2 = _spread_once(rng, d2)
    if rng.random() < 0.5:
        shift = rng.randint(0, 2)
        d1 = DiscreteMeasure(
            tuple(a + shift for a in d1.atoms), d1.masses, d1.exact
        )
    return d1, d2


def _random_nonincreasing_g(rng: random.Random) -> StepFunction:
    k = rng.randint(0, 4)
    cuts = sorted(rng.sample(range(1, 10), k))
    breakpoints = tuple(Rat(c, 10) for c in cuts)
    vals = sorted((Rat(rng.randint(0, 12), 4) for _ in range(k + 1)), reverse=True)
    return StepFunction(breakpoints, tuple(vals), right_continuous=False)


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------


def run_prop1(trials: int = 1000, seed: int = 20240601, *, mode: str = "auto") -> SuiteResult:
    rng = random.Random(seed)
    res = SuiteResult("prop1", trials)
    start = time.perf_counter()
    arb = 0
    for t in range(trials):
        m = random_market(rng)
        rep = check_prop1(m, mode=mode)
        if rep.cv_arbitrage:
            arb += 1
        if not rep.consistent:
            res.failures.append(
                {"trial": t, "market": [str(x) for x in m.grid],
                 "mu": [str(x) for x in m.mu], "nu": [str(x) for x in m.nu]}
            )
    res.elapsed = time.perf_counter() - start
    res.detail = {"with_arbitrage": arb}
    return res


def _brute_equal_minimum(m: MarketModel):
    """Distribution-equality minimum by permutation enumeration (n <= 6)."""
    best = None
    for perm in permutations(m.grid):
        if pushforward(m, perm).atoms != m.objective.atoms:
            continue
        if pushforward(m, perm).masses != m.objective.masses:
            continue
        p = price(m, perm)
        if best is None or p < best:
            best = p
    return best


def run_prop2(
    trials: int = 300, seed: int = 20240602, *, mode: str = "auto",
    cross_check_max_n: int = 6,
) -> SuiteResult:
    rng = random.Random(seed)
    res = SuiteResult("prop2", trials)
    start = time.perf_counter()
    arb = 0
    crosschecked = 0
    for t in range(trials):
        m = random_market(rng, adequate=True)
        rep = check_prop2(m, mode=mode)
        bad = []
        if not rep.equivalent:
            bad.append("equivalence")
        if not rep.minima_agree:
            bad.append("minima")
        if rep.arbitrage["cv"]:
            arb += 1
        audit = verify_ompd(m)
        if not audit.distribution_preserved:
            bad.append("distribution")
        if not audit.countermonotone:
            bad.append("countermonotone")
        eq_res = min_price(m, OrderRelation.EQUAL, mode=mode)
        if eq_res.node_count != 1:
            bad.append(f"root_node_count={eq_res.node_count}")
        if m.n <= cross_check_max_n:
            crosschecked += 1
            brute = _brute_equal_minimum(m)
            if brute != rep.values["eq"]:
                bad.append(f"brute_equal={brute}!={rep.values['eq']}")
        if bad:
            res.failures.append(
                {"trial": t, "problems": bad, "atoms": [str(x) for x in m.grid],
                 "mu": [str(x) for x in m.mu], "nu": [str(x) for x in m.nu]}
            )
    res.elapsed = time.perf_counter() - start
    res.detail = {"with_arbitrage": arb, "permutation_cross_checks": crosschecked}
    return res


def _check_inverse(rng: random.Random) -> bool:
    d = random_measure(rng)
    q = quantile(d)
    f = cdf(d)
    points = set(d.atoms)
    atoms = sorted(d.atoms)
    for a, b in zip(atoms, atoms[1:]):
        points.add(Rat(a + b, 2))
    points.add(atoms[-1] + 1)
    points.add(Rat(2 * atoms[0] + 1, 2) - Rat(1, 2))  # = atoms[0], harmless
    if atoms[0] > 0:
        points.add(Rat(atoms[0], 2))
    points.add(0)
    for x in points:
        fx = f(x)
        # inf-definition: the 0-level quantile is 0, not the smallest atom
        qfx = 0 if fx == 0 else q(fx)
        if not qfx <= x:
            return False
    return True


def _check_pit(rng: random.Random) -> bool:
    d = random_measure(rng)
    f = cdf(d)
    levels = [f(a) for a in d.atoms]
    u = levels[rng.randrange(len(levels))]
    mass = sum(w for a, w in zip(d.atoms, d.masses) if f(a) <= u)
    return mass == u


def _expected_utility(d: DiscreteMeasure, kinks, slopes):
    """E[u(Y)] for the concave nondecreasing u with u(0)=0 whose slope is
    slopes[k] between consecutive kinks (slopes nonincreasing, >= 0)."""
    total = Rat(0)
    for a, w in zip(d.atoms, d.masses):
        val = Rat(0)
        prev = 0
        for kink, s in zip(list(kinks) + [None], slopes):
            top = a if kink is None or kink > a else kink
            val = val + s * (top - prev)
            prev = top
            if kink is None or kink >= a:
                break
        total = total + w * val
    return total


def _check_ssd_methods(rng: random.Random) -> bool:
    if rng.random() < 0.5:
        d1, d2 = _ssd_pair(rng)
    else:
        d1 = random_measure(rng)
        d2 = random_measure(rng)
    answers = {
        dominates_ssd(d1, d2, method=meth)
        for meth in ("cdf_integral", "quantile_integral", "shortfall")
    }
    if len(answers) != 1:
        return False
    verdict = answers.pop()
    # utility-family criterion: E[min(f, t)] at every pooled atom decides
    # the nondecreasing-concave inequality for discrete distributions
    thresholds = set(d1.atoms) | set(d2.atoms)
    utility = all(
        (t - expected_shortfall(d1, t)) >= (t - expected_shortfall(d2, t))
        for t in thresholds
    )
    if verdict != utility:
        return False
    if verdict:
        # dominance must survive arbitrary concave nondecreasing utilities
        for _ in range(3):
            k = rng.randint(0, 3)
            kinks = sorted(rng.sample(range(1, 15), k))
            slopes = sorted(
                (Rat(rng.randint(0, 8), 2) for _ in range(k + 1)), reverse=True
            )
            if _expected_utility(d1, kinks, slopes) < _expected_utility(
                d2, kinks, slopes
            ):
                return False
    return True


def _check_majorization(rng: random.Random) -> bool:
    d1, d2 = _ssd_pair(rng)
    if not dominates_ssd(d1, d2):  # construction guarantees this
        return False
    g = _random_nonincreasing_g(rng)
    return hardy_majorization_holds(quantile(d1), quantile(d2), g)


def _check_rearrangement(rng: random.Random) -> bool:
    m = random_market(rng, n_min=2, n_max=6)
    n = m.n
    style = rng.random()
    if style < 0.35:
        f = sorted(rng.randint(0, 9) for _ in range(n))
        g = sorted((rng.randint(0, 9) for _ in range(n)), reverse=True)
    elif style < 0.7:
        f = sorted(rng.randint(0, 9) for _ in range(n))
        g = sorted(rng.randint(0, 9) for _ in range(n))
    else:
        f = [rng.randint(0, 9) for _ in range(n)]
        g = [rng.randint(0, 9) for _ in range(n)]
    lower, upper = hardy_littlewood_bounds(m, f, g)
    actual = sum(w * fi * gi for w, fi, gi in zip(m.mu, f, g))
    if not lower <= actual <= upper:
        return False
    if is_countermonotone(m, f, g) and actual != lower:
        return False
    if is_comonotone(m, f, g) and actual != upper:
        return False
    return True


_LEMMA_CHECKS = {
    "inverse": _check_inverse,
    "pit": _check_pit,
    "ssd_criteria": _check_ssd_methods,
    "majorization": _check_majorization,
    "rearrangement": _check_rearrangement,
}


def run_lemmas(instances: int = 500, seed: int = 20240603) -> SuiteResult:
    rng = random.Random(seed)
    res = SuiteResult("lemmas", instances * len(_LEMMA_CHECKS))
    start = time.perf_counter()
    counts = {}
    for name, check in _LEMMA_CHECKS.items():
        counts[name] = 0
        for t in range(instances):
            if check(rng):
                counts[name] += 1
            else:
                res.failures.append({"lemma": name, "instance": t})
    res.elapsed = time.perf_counter() - start
    res.detail = {"instances_per_lemma": instances, "passed": counts}
    return res


SUITES = {"prop1": run_prop1, "prop2": run_prop2, "lemmas": run_lemmas}


def run_suite(name: str, trials: int | None = None, seed: int | None = None) -> SuiteResult:
    if name not in SUITES:
        raise UnknownMethod(f"unknown suite {name!r}")
    kwargs = {}
    if trials is not None:
        kwargs["trials" if name != "lemmas" else "instances"] = trials
    if seed is not None:
        kwargs["seed"] = seed
    return SUITES[name](**kwargs)
