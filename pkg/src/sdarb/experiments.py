"""Fixed synthetic market for the convergence experiment.

The objective density is flat on [0.80, 1.20] (tabulated at step
0.001), so every grid cell of the discretized market carries the same
probability and all the structure sits in the pricing kernel.  Two
kernels are studied:

* ``hump_kernel``: a decreasing affine trend with a localized bump, so
  the kernel has exactly one interior increasing region (nonmonotone);
* ``monotone_kernel``: strictly decreasing affine, the no-arbitrage
  reference case.

Everything here is deterministic; the tables double as the versioned
experiment configuration.
"""

from __future__ import annotations

from math import exp
from typing import Callable

from .discretize import DensityTable

__all__ = [
    "DENSITY_SPAN",
    "EXPERIMENT_INTERVAL",
    "synthetic_density",
    "hump_kernel",
    "monotone_kernel",
]

DENSITY_SPAN = (0.80, 1.20)
# the discretization window for the convergence runs
EXPERIMENT_INTERVAL = DENSITY_SPAN

_STEP = 0.001


def synthetic_density() -> DensityTable:
    """Flat objective density table on [0.80, 1.20]."""
    lo, hi = DENSITY_SPAN
    count = round((hi - lo) / _STEP)
    xs = [lo + _STEP * i for i in range(count + 1)]
    ys = [1.0] * (count + 1)
    return DensityTable(tuple(xs), tuple(ys))


def hump_kernel() -> Callable[[float], float]:
    """Decreasing trend plus a narrow bump: one interior increasing region."""

    def k(x: float) -> float:
        z = (x - 1.06) / 0.025
        return 2.6 - 4.5 * (x - 1.0) + 1.8 * exp(-z * z)

    return k


def monotone_kernel() -> Callable[[float], float]:
    """Strictly decreasing kernel (no stochastic arbitrage)."""

    def k(x: float) -> float:
        return 2.0 - 2.5 * (x - 1.0)

    return k
