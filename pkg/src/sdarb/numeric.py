"""Dual-mode arithmetic for the package.

Every quantity in this package lives in one of two arithmetic modes:

* exact mode: rational numbers (``gmpy2.mpq`` when available, stdlib
  ``fractions.Fraction`` otherwise).  Comparisons are exact and
  serialization is lossless ``"p/q"`` strings.
* float mode: IEEE doubles.  Comparisons use the package-wide absolute
  tolerance ``EPS_COMPARE``; serialization uses 17-significant-digit
  decimals, which round-trip.

A derived object is exact iff every input number is exact.  Mixing a
float into exact inputs demotes the whole computation to float mode.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

try:
    from gmpy2 import mpq as Rat
except ImportError:  # pragma: no cover - environment without gmpy2
    Rat = Fraction

_RAT_TYPE = type(Rat(0))

Number = Union[int, float, Fraction, _RAT_TYPE]

# Absolute tolerance for float-mode value comparisons.
EPS_COMPARE = 1e-9
# Kernel values closer than this are reported as ties by the tie audit.
EPS_KERNEL = 1e-12
# Simplex pivot magnitude floor (float lane).
EPS_PIVOT = 1e-10
# Constraint feasibility tolerance for float-mode solver results.
EPS_FEAS = 1e-9
# Margin for declaring a strict price improvement in float mode.
EPS_ARB = 1e-8


def is_exact(x) -> bool:
    """True when ``x`` carries exact (rational) arithmetic."""
    return isinstance(x, (int, Fraction, _RAT_TYPE))


def all_exact(values: Iterable) -> bool:
    return all(is_exact(v) for v in values)


def to_number(raw) -> Number:
    """Coerce a parsed token into a package number.

    Strings (``"2/3"``, ``"0.25"``) and ints become exact rationals;
    floats stay floats.  Anything exact is normalized to ``Rat``.
    """
    if isinstance(raw, str):
        return Rat(Fraction(raw))
    if isinstance(raw, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(raw, int):
        return Rat(raw)
    if isinstance(raw, (Fraction, _RAT_TYPE)):
        return Rat(raw)
    if isinstance(raw, float):
        return raw
    try:  # numpy scalars, Decimal, ...
        import numpy as np

        if isinstance(raw, np.integer):
            return Rat(int(raw))
        if isinstance(raw, np.floating):
            return float(raw)
    except ImportError:  # pragma: no cover
        pass
    raise TypeError(f"cannot interpret {raw!r} as a number")


def as_exact(x) -> Number:
    """Lift to a rational (floats convert via their exact binary value)."""
    if isinstance(x, float):
        return Rat(Fraction(x))
    return Rat(x)


def as_float(x) -> float:
    return float(x)


def number_str(x) -> str:
    """Serialize a number: ``p/q`` when exact, ``%.17g`` when float."""
    if is_exact(x):
        return str(Rat(x))
    return "%.17g" % float(x)


def approx_eq(a, b, exact: bool, eps: float = EPS_COMPARE) -> bool:
    if exact:
        return a == b
    return abs(a - b) <= eps


def leq(a, b, exact: bool, eps: float = EPS_COMPARE) -> bool:
    if exact:
        return a <= b
    return a <= b + eps


def geq(a, b, exact: bool, eps: float = EPS_COMPARE) -> bool:
    if exact:
        return a >= b
    return a + eps >= b
