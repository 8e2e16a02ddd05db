"""Analytics of the limiting law of self-normalized quadratic forms.

The law is parametrized by a base probability measure nu and a tail index
alpha in (0, 2). Its Stieltjes transform is the ratio

    s(z) = - ∫ (z - x)^(alpha/2 - 1) nu(dx) / ∫ (z - x)^(alpha/2) nu(dx)

with principal-branch powers (cut along (-infty, 0]). The density on the open
interval K = (inf supp nu, sup supp nu) is assembled from the one-sided
fractional integrals; the measure itself has no atoms for non-degenerate nu,
which the non-tangential probe ``atom_mass`` verifies numerically.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import betaln

from .errors import (
    DegenerateMeasure,
    DivergentCost,
    DivergentIntegral,
    InvalidAlpha,
    NumericalInvariantError,
    PointInSupport,
    UnsupportedFamily,
)
from .measure import (
    Measure,
    complex_frac_integral,
    frac_integrals,
    mean_and_power_moments,
)

_MAX_MOMENT_ORDER = 20  # 2^(l-1) compositions; enumeration refused above this
_QUAD_OPTS = dict(epsabs=1e-12, epsrel=1e-10, limit=200)


@dataclass(frozen=True)
class ComplexPoint:
    re: float
    im: float

    def as_complex(self) -> complex:
        return complex(self.re, self.im)


def _as_complex(z) -> complex:
    if isinstance(z, ComplexPoint):
        return z.as_complex()
    return complex(z)


class LimitLaw:
    """Immutable (nu, alpha) pair with cached CDF table for bulk evaluation."""

    def __init__(self, nu: Measure, alpha: float):
        alpha = float(alpha)
        if not 0.0 < alpha < 2.0:
            raise InvalidAlpha(f"alpha must lie strictly inside (0, 2), got {alpha}")
        for piece in nu.pieces:
            if piece.tail == "pareto" and piece.param <= alpha / 2.0:
                raise DivergentIntegral(
                    f"pareto shape {piece.param} must exceed alpha/2 = {alpha / 2.0}"
                )
        self.nu = nu
        self.alpha = alpha
        self._table = None

    def support(self) -> tuple[float, float]:
        return self.nu.support()

    def to_json(self) -> dict:
        return {"nu": self.nu.to_json(), "alpha": self.alpha}

    @staticmethod
    def from_json(obj: dict) -> "LimitLaw":
        return LimitLaw(Measure.from_json(obj["nu"]), obj["alpha"])


# ---------------------------------------------------------------------------
# Stieltjes transform and moments
# ---------------------------------------------------------------------------


def stieltjes(law: LimitLaw, z) -> complex:
    """s(z) for z outside the support interval of nu (principal branch)."""
    z = _as_complex(z)
    lo, hi = law.support()
    if z.imag == 0.0 and lo <= z.real <= hi:
        raise PointInSupport(f"z={z} lies in the support interval [{lo}, {hi}]")
    half = law.alpha / 2.0
    num = complex_frac_integral(law.nu, half - 1.0, z)
    den = complex_frac_integral(law.nu, half, z)
    if den == 0.0:
        raise NumericalInvariantError("denominator of the Stieltjes ratio vanished")
    val = -num / den
    if z.imag > 1e-12 and val.imag < -1e-10:
        raise NumericalInvariantError(
            f"Nevanlinna property violated: Im s({z}) = {val.imag}"
        )
    return val


def _compositions(total: int, parts: int):
    for cuts in itertools.combinations(range(1, total), parts - 1):
        prev = 0
        comp = []
        for c in cuts + (total,):
            comp.append(c - prev)
            prev = c
        yield comp


def moment(law: LimitLaw, ell: int) -> float:
    """m_ell via exact enumeration of the compositions of ell.

    The composition count is 2^(ell-1); orders above 20 are refused
    (DivergentCost) rather than approximated.
    """
    ell = int(ell)
    if ell < 1:
        raise ValueError("moment order must be >= 1")
    if ell > _MAX_MOMENT_ORDER:
        raise DivergentCost(
            f"moment order {ell} needs {2 ** (ell - 1)} compositions; refusing"
        )
    half = law.alpha / 2.0
    mu = mean_and_power_moments(law.nu, ell)
    g = [0.0] * (ell + 1)
    for s in range(1, ell + 1):
        g[s] = math.gamma(s - half) / math.factorial(s) * mu[s - 1]
    gamma_ref = math.gamma(1.0 - half)
    total = 0.0
    for r in range(1, ell + 1):
        inner = 0.0
        for comp in _compositions(ell, r):
            term = 1.0
            for part in comp:
                term *= g[part]
            inner += term
        total += half ** (r - 1) * (ell / r) / gamma_ref**r * inner
    return total


# ---------------------------------------------------------------------------
# Density and CDF
# ---------------------------------------------------------------------------


def _require_non_degenerate(law: LimitLaw) -> None:
    if law.nu.is_degenerate():
        raise DegenerateMeasure("density/cdf require a non-degenerate base measure")


def density(law: LimitLaw, x: float) -> float:
    """Density at x; 0 outside K, +inf marker at atoms of nu."""
    _require_non_degenerate(law)
    x = float(x)
    lo, hi = law.support()
    if law.nu.atom_weight(x) > 0.0:
        return math.inf
    if x <= lo or x >= hi:
        return 0.0
    fi = frac_integrals(law.nu, law.alpha, x)
    theta = law.alpha * math.pi / 2.0
    a, b = fi.a_plus, fi.b_minus
    # A^2 + B^2 + 2AB cos(theta) rewritten to avoid cancellation near alpha=2
    denom = (a - b) ** 2 + 4.0 * a * b * math.cos(theta / 2.0) ** 2
    numer = a * fi.b_minus_dm1 + b * fi.a_plus_dm1
    if denom == 0.0:
        return math.inf if numer > 0 else 0.0
    return max(math.sin(theta) / math.pi * numer / denom, 0.0)


def _integrate_density(law: LimitLaw, a: float, b: float) -> float:
    """∫_a^b f with the u = (distance)^(alpha/2) substitution at both endpoints.

    Valid when the only candidate singularities of f on [a, b] sit at the
    endpoints (callers split at the atoms of nu).
    """
    if b <= a:
        return 0.0
    half = law.alpha / 2.0
    inv = 2.0 / law.alpha
    mid = 0.5 * (a + b)

    def from_left(u):
        return inv * u ** (inv - 1.0) * density(law, a + u**inv) if u > 0.0 else 0.0

    def from_right(u):
        return inv * u ** (inv - 1.0) * density(law, b - u**inv) if u > 0.0 else 0.0

    left = integrate.quad(from_left, 0.0, (mid - a) ** half, **_QUAD_OPTS)[0]
    right = integrate.quad(from_right, 0.0, (b - mid) ** half, **_QUAD_OPTS)[0]
    return left + right


def cdf(law: LimitLaw, x: float) -> float:
    """Adaptive integration of the density from inf K to x."""
    _require_non_degenerate(law)
    x = float(x)
    lo, hi = law.support()
    if x <= lo:
        return 0.0
    top = min(x, hi)
    cuts = [lo] + [a for a in law.nu.atom_locations() if lo < a < top] + [top]
    total = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        total += _integrate_density(law, a, b)
    return float(min(max(total, 0.0), 1.0))


def _table_grid(law: LimitLaw) -> np.ndarray:
    lo, hi = law.support()
    if math.isfinite(hi):
        base = np.linspace(lo, hi, 1025)
    else:
        hi_eff = float(law.nu.quantile(1.0 - 1e-8))
        base = np.linspace(lo, hi_eff, 1025)
        if hi_eff > 10.0 * max(abs(lo), 1.0):
            base = np.union1d(base, np.geomspace(max(lo, 1e-6) + 1.0, hi_eff, 513))
        hi = hi_eff
    points = [base]
    span = hi - lo
    for atom in law.nu.atom_locations():
        offsets = span * 2.0 ** -np.arange(1.0, 45.0)
        for sign in (-1.0, 1.0):
            pts = atom + sign * offsets
            points.append(pts[(pts > lo) & (pts < hi)])
    return np.unique(np.concatenate(points))


def cdf_table(law: LimitLaw) -> tuple[np.ndarray, np.ndarray]:
    """Cached (grid, F) pair; cell increments use the singular substitution."""
    if law._table is None:
        _require_non_degenerate(law)
        grid = _table_grid(law)
        incr = np.zeros(len(grid))
        for i in range(1, len(grid)):
            incr[i] = _integrate_density(law, grid[i - 1], grid[i])
        f = np.minimum(np.maximum.accumulate(np.cumsum(incr)), 1.0)
        law._table = (grid, f)
    return law._table


def cdf_at(law: LimitLaw, xs: np.ndarray) -> np.ndarray:
    """Bulk CDF evaluation through the cached table (linear interpolation)."""
    grid, f = cdf_table(law)
    return np.interp(xs, grid, f, left=0.0, right=float(f[-1]))


def law_quantiles(law: LimitLaw, count: int) -> np.ndarray:
    """count mid-quantiles of the law, read off the cached table."""
    grid, f = cdf_table(law)
    qs = (np.arange(count) + 0.5) / count
    return np.interp(qs, f, grid)


def quantile_measure(law: LimitLaw, count: int = 512) -> Measure:
    """Discrete quantile approximation of the law (for weak-distance checks)."""
    locs = law_quantiles(law, count)
    weights: dict[float, float] = {}
    for v in locs:
        weights[float(v)] = weights.get(float(v), 0.0) + 1.0 / count
    return Measure.discrete(sorted(weights.items()))


# ---------------------------------------------------------------------------
# Atom probe, tails, boundary laws
# ---------------------------------------------------------------------------


def atom_mass(law: LimitLaw, a: float, v_sequence=None) -> float:
    """Non-tangential probe lim (a - z) s(z) along z = a + iv, Aitken-extrapolated."""
    if v_sequence is None:
        v_sequence = np.geomspace(1e-1, 1e-6, 11)
    vs = np.asarray(list(v_sequence), dtype=float)
    if len(vs) < 3:
        raise ValueError("need at least three probe heights")
    g = np.array(
        [(a - complex(a, v)) * stieltjes(law, complex(a, v)) for v in vs]
    )
    g0, g1, g2 = g[-3], g[-2], g[-1]
    dd = g2 - 2.0 * g1 + g0
    if abs(dd) < 1e-14 * max(1.0, abs(g2)):
        limit = g2
    else:
        limit = g2 - (g2 - g1) ** 2 / dd
    if not np.isfinite(limit.real):
        raise PointInSupport(f"atom probe diverged at a={a}")
    return float(min(max(limit.real, 0.0), 1.0))


def tail_asymptote(law: LimitLaw, x: float) -> float:
    """Leading-order density asymptote for exponential(1) and Pareto bases."""
    fam = law.nu.family
    if fam is None:
        raise UnsupportedFamily("tail asymptote needs a named exponential/pareto base")
    half = law.alpha / 2.0
    if fam[0] == "exponential" and fam[1] == 1.0:
        return x**-half * math.exp(-x) / math.gamma(1.0 - half)
    if fam[0] == "pareto":
        s = fam[1]
        coef = (
            s
            / math.pi
            * math.sin(half * math.pi)
            * (math.exp(betaln(half, s + 1.0 - half)) + math.exp(betaln(half + 1.0, s - half)))
        )
        return coef * x ** (-s - 1.0)
    raise UnsupportedFamily(f"no tail asymptote for family {fam[0]!r}")


def boundary_law(nu: Measure, which: str) -> Measure:
    """Weak limits at the edges of the tail-index range: delta at the mean, or nu."""
    if which == "alpha_to_2":
        return Measure.point_mass(nu.mean())  # mean() raises DivergentMoment if infinite
    if which == "alpha_to_0":
        return nu
    raise ValueError("which must be 'alpha_to_0' or 'alpha_to_2'")
