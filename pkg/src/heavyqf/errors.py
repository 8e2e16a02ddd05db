"""Exception taxonomy shared by all heavyqf modules."""


class HeavyQFError(Exception):
    """Base class for all package errors."""


class InvalidAlpha(HeavyQFError, ValueError):
    """Tail index outside the open interval (0, 2)."""


class DivergentIntegral(HeavyQFError, ValueError):
    """A fractional-power integral does not converge (e.g. Pareto shape <= alpha/2)."""


class DivergentMoment(HeavyQFError, ValueError):
    """A requested power moment of the measure is infinite."""


class DivergentCost(HeavyQFError, ValueError):
    """Exact enumeration refused because the combinatorial budget is exceeded."""


class PointInSupport(HeavyQFError, ValueError):
    """Evaluation point lies in (or too close to) the support of the measure."""


class DegenerateMeasure(HeavyQFError, ValueError):
    """Operation requires a non-degenerate measure but got a point mass."""


class UnsupportedFamily(HeavyQFError, ValueError):
    """Operation is only defined for a restricted set of families."""


class ZeroVector(HeavyQFError, ValueError):
    """Cannot self-normalize the all-zero vector."""


class DimensionMismatch(HeavyQFError, ValueError):
    """Vector/matrix dimensions are incompatible."""


class NotSymmetric(HeavyQFError, ValueError):
    """Matrix is not symmetric within tolerance."""


class NoConvergence(HeavyQFError, RuntimeError):
    """Iterative solver failed to converge within its sweep budget."""


class PointOnSpectrumAxis(HeavyQFError, ValueError):
    """Resolvent argument lies on [0, +inf), where the resolvent may be singular."""


class InvalidZ(HeavyQFError, ValueError):
    """Concentration experiment requires a real negative z."""


class ZeroRow(HeavyQFError, RuntimeError):
    """A data-matrix row was identically zero even after one redraw."""


class NumericalInvariantError(HeavyQFError, RuntimeError):
    """A runtime invariant (bound, normalization, ...) was violated numerically."""
