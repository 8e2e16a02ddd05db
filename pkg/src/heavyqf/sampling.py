"""Samplers for heavy- and light-tailed entry distributions and their
self-normalized vectors, plus mixed-moment estimation.

All families are symmetric by construction: a magnitude is drawn by inverse
transform (or a library routine) and the sign is an independent fair coin.
Sampling is deterministic given a SeedStream.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import InvalidAlpha, UnsupportedFamily, ZeroVector
from .streams import SeedStream

HEAVY_FAMILIES = ("symmetric_pareto", "student_t", "slowly_varying")
SUBGAUSSIAN_FAMILIES = ("rademacher", "standard_gaussian", "uniform_symmetric")


@dataclass(frozen=True)
class HeavyTailSpec:
    """Entry distribution of the data: family name plus tail index when used."""

    family: str
    alpha: float | None = None

    def __post_init__(self):
        if self.family not in HEAVY_FAMILIES + SUBGAUSSIAN_FAMILIES:
            raise UnsupportedFamily(f"unknown family {self.family!r}")
        if self.family in ("symmetric_pareto", "student_t"):
            if self.alpha is None or not 0.0 < self.alpha < 2.0:
                raise InvalidAlpha(
                    f"{self.family} requires a tail index in (0, 2), got {self.alpha}"
                )

    def is_subgaussian(self) -> bool:
        return self.family in SUBGAUSSIAN_FAMILIES

    def to_json(self) -> dict:
        out = {"family": self.family}
        if self.alpha is not None:
            out["alpha"] = self.alpha
        return out

    @staticmethod
    def from_json(obj: dict) -> "HeavyTailSpec":
        return HeavyTailSpec(obj["family"], obj.get("alpha"))


@dataclass(frozen=True)
class SampleVector:
    """Unit vector y = x / ||x||_2 together with the norm that was divided out."""

    y: np.ndarray
    source_norm: float


@dataclass(frozen=True)
class MixedMomentEstimate:
    indices: tuple[int, ...]
    n: int
    reps: int
    value: float
    std_error: float


def sample_xi(spec: HeavyTailSpec, count: int, stream: SeedStream) -> np.ndarray:
    """Draw `count` iid entries; magnitude by inverse transform, sign by coin."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = stream.generator()
    fam = spec.family
    if fam == "symmetric_pareto":
        u = rng.uniform(0.0, 1.0, size=count)
        mag = u ** (-1.0 / spec.alpha)
    elif fam == "student_t":
        mag = np.abs(rng.standard_t(spec.alpha, size=count))
    elif fam == "slowly_varying":
        # P(|xi| > x) = 1/(1 + ln x) for x >= 1; exact inverse transform
        u = rng.uniform(0.0, 1.0, size=count)
        mag = np.exp(1.0 / u - 1.0)
    elif fam == "rademacher":
        mag = np.ones(count)
    elif fam == "standard_gaussian":
        mag = np.abs(rng.standard_normal(size=count))
    elif fam == "uniform_symmetric":
        mag = rng.uniform(0.0, 1.0, size=count)
    else:  # pragma: no cover
        raise UnsupportedFamily(fam)
    sign = rng.integers(0, 2, size=count) * 2 - 1
    return sign * mag


def self_normalize(x: np.ndarray) -> SampleVector:
    x = np.asarray(x, dtype=float)
    norm = float(np.linalg.norm(x))
    if norm == 0.0:
        raise ZeroVector("cannot normalize the zero vector")
    return SampleVector(y=x / norm, source_norm=norm)


def sample_unit_vector(spec: HeavyTailSpec, n: int, stream: SeedStream) -> SampleVector:
    return self_normalize(sample_xi(spec, n, stream))


def argmax_sign(y: SampleVector | np.ndarray) -> tuple[int, int]:
    """Index of the largest |y_k| (first one on ties) and the sign there."""
    arr = y.y if isinstance(y, SampleVector) else np.asarray(y)
    idx = int(np.argmax(np.abs(arr)))
    return idx, (1 if arr[idx] >= 0 else -1)


# ---------------------------------------------------------------------------
# Mixed moments
# ---------------------------------------------------------------------------


def _set_partitions(items: list):
    if not items:
        yield []
        return
    head, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[head] + part[i]] + part[i + 1 :]
        yield [[head]] + part


def _make_tuple_mean(ks: tuple[int, ...]):
    """Estimator for the mean of prod_j Y_{i_j}^(2 k_j) over distinct tuples.

    Moebius inversion over set partitions turns the distinct-index constraint
    into power sums S_m = sum_i Y_i^(2m); exact, O(n) per replicate.
    """
    terms = []
    needed = set()
    for part in _set_partitions(list(range(len(ks)))):
        weight = 1.0
        sums = []
        for block in part:
            weight *= (-1.0) ** (len(block) - 1) * math.factorial(len(block) - 1)
            m = sum(ks[j] for j in block)
            sums.append(m)
            needed.add(m)
        terms.append((weight, tuple(sums)))
    needed = sorted(needed)

    def estimate(y2: np.ndarray) -> float:
        power = {m: float(np.sum(y2**m)) for m in needed}
        total = 0.0
        for weight, sums in terms:
            total += weight * math.prod(power[m] for m in sums)
        n = len(y2)
        denom = math.prod(n - j for j in range(len(ks)))
        return total / denom

    return estimate


def mixed_moment(
    spec: HeavyTailSpec,
    indices,
    n: int,
    reps: int,
    stream: SeedStream,
) -> MixedMomentEstimate:
    """Monte Carlo estimate of E[Y_1^(2k_1) ... Y_r^(2k_r)].

    Each replicate contributes the exchangeable average over all ordered
    distinct index tuples instead of the single tuple (1, ..., r); that
    estimator is unbiased for the same moment and cuts the variance by orders
    of magnitude for heavy tails.
    """
    ks = tuple(int(k) for k in indices)
    if len(ks) > n:
        raise ValueError("need r <= n")
    if reps < 100:
        raise ValueError("reps must be >= 100")
    estimate = _make_tuple_mean(ks)
    vals = np.empty(reps)
    for i in range(reps):
        y = sample_unit_vector(spec, n, stream.child(i)).y
        vals[i] = estimate(y * y)
    value = float(np.mean(vals))
    std_error = float(np.std(vals, ddof=1) / math.sqrt(reps))
    return MixedMomentEstimate(ks, n, reps, value, std_error)


def theoretical_mixed_moment_limit(alpha: float, indices) -> float:
    """Closed-form limit of n^r E[Y_1^(2k_1) ... Y_r^(2k_r)], log-gamma evaluated."""
    alpha = float(alpha)
    if not 0.0 < alpha < 2.0:
        raise InvalidAlpha(f"alpha must lie in (0, 2), got {alpha}")
    ks = [int(k) for k in indices]
    if any(k < 1 for k in ks):
        raise ValueError("all indices must be >= 1")
    r = len(ks)
    half = alpha / 2.0
    log_value = (
        (r - 1) * math.log(half)
        + gammaln(r)
        + sum(gammaln(k - half) for k in ks)
        - r * gammaln(1.0 - half)
        - gammaln(sum(ks))
    )
    return float(math.exp(log_value))
