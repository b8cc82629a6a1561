"""Exception hierarchy.

Every precondition failure raises a subclass of :class:`SdarbError`, so
callers (and the CLI) can distinguish bad input from solver trouble.
"""

from __future__ import annotations


class SdarbError(ValueError):
    """Base class for all package-specific errors."""


class LengthMismatch(SdarbError):
    """Parallel sequences (atoms / masses / payoffs) differ in length."""


class NonIncreasingAtoms(SdarbError):
    """Atom grid is not strictly increasing (duplicates are rejected)."""


class ZeroMass(SdarbError):
    """A measure assigns nonpositive mass to an atom of the shared grid."""


class MuNotProbability(SdarbError):
    """Objective masses do not sum to one."""


class NotProbability(SdarbError):
    """A measure required to be a probability measure is not."""


class UnknownMethod(SdarbError):
    """Unrecognized method / relation / suite name."""


class GNotMonotone(SdarbError):
    """Weight function for the weighted-majorization check must be nonincreasing."""


class EmptyMass(SdarbError):
    """Discretization produced a cell with no mass."""


class NonpositiveKernel(SdarbError):
    """Pricing kernel values must be strictly positive."""


class FlatKernelRegion(SdarbError):
    """Continuous kernel has ties on the sample grid; its CDF is not invertible there."""


class PreconditionInadequate(SdarbError):
    """Operation requires a uniform (equal-mass) objective measure."""


class SolverError(SdarbError):
    """Linear solver failed to produce a usable result."""
