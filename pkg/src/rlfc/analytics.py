"""Decoding-probability model for constrained random linear fountain codes.

All quantities describe a transmitter that draws coefficient vectors
uniformly from GF(q)^k minus an exclusion set: every vector expressible as
a linear combination of at most gamma previously transmitted vectors (the
empty combination supplies the zero vector).  A receiver holding u
innovative codewords sees the next arrival dependent with probability

    P(D_u) = (q^u - X(u)) / (q^k - X(u)),   X(u) = sum_{i<=gamma} C(u, i) (q-1)^i

The exclusion count X(u) uses combinations of the u vectors the receiver
already absorbed, C(u, i), not C(gamma, i): brute-force enumeration over
small parameter grids (k=3, gamma=1, u=2 gives 1/5) pins that choice, and
the test suite re-derives it.  Do not switch the upper index back to gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import List, Optional, Tuple

__all__ = [
    "ExcessDistribution",
    "ModelParams",
    "baseline_traditional",
    "excess_distribution",
    "expected_excess_closed_form",
    "feasibility_bound",
    "infeasible_from",
    "prob_dependent",
    "prob_dependent_exact",
]


@dataclass(frozen=True, slots=True)
class ModelParams:
    """Model inputs: dimension k over GF(q), combination bound gamma.

    blockack=True models a receiver that reports its basis one codeword
    short of full rank and is then handed a guaranteed-innovative one, so
    the last rank step never costs excess arrivals.  delta_max truncates
    the excess series; truncated mass above tail_tolerance raises the
    tail_warning flag on results.
    """

    k: int
    q: int = 2
    gamma: int = 0
    blockack: bool = False
    delta_max: int = 64
    tail_tolerance: float = 1e-9

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.q < 2:
            raise ValueError(f"q must be >= 2, got {self.q}")
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")
        if self.delta_max < 0:
            raise ValueError(f"delta_max must be >= 0, got {self.delta_max}")
        if not 0.0 < self.tail_tolerance < 1.0:
            raise ValueError(
                f"tail_tolerance must be in (0, 1), got {self.tail_tolerance}"
            )


def _excluded_count(u: int, gamma: int, q: int) -> int:
    """Vectors within combination reach gamma of u fixed vectors (with multiplicity)."""
    return sum(math.comb(u, i) * (q - 1) ** i for i in range(gamma + 1))


def prob_dependent_exact(u: int, p: ModelParams) -> Fraction:
    """P(D_u) as an exact rational; see prob_dependent."""
    if not 0 <= u < p.k:
        raise ValueError(f"u must be in [0, k), got u={u} with k={p.k}")
    x = _excluded_count(u, p.gamma, p.q)
    return Fraction(p.q**u - x, p.q**p.k - x)


def prob_dependent(u: int, p: ModelParams) -> float:
    """Probability the next arrival is dependent at receiver rank u.

    Zero for u <= gamma: every combination of that few received vectors is
    excluded at the transmitter, so a dependent arrival cannot occur.
    """
    return float(prob_dependent_exact(u, p))


def feasibility_bound(k: int, q: int, gamma: int, transmitted_count: int) -> int:
    """Signed slack q^k - X(transmitted_count) of the constrained draw rule.

    Positive slack means vectors outside the exclusion set still exist (the
    count is a lower bound on the allowed set, since combination values can
    coincide).  The slack only shrinks as the history grows, so once it
    hits zero or below it stays there.
    """
    if min(k, q, gamma, transmitted_count) < 0:
        raise ValueError("all feasibility_bound inputs must be >= 0")
    return q**k - _excluded_count(transmitted_count, gamma, q)


@lru_cache(maxsize=None)
def infeasible_from(k: int, q: int, gamma: int) -> Optional[int]:
    """Smallest history size with nonpositive slack; None if it stays positive."""
    if gamma == 0:
        return None  # slack is q^k - 1 forever
    lo, hi = 0, 1
    while feasibility_bound(k, q, gamma, hi) > 0:
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if feasibility_bound(k, q, gamma, mid) > 0:
            lo = mid
        else:
            hi = mid
    return hi


@dataclass(frozen=True, slots=True)
class ExcessDistribution:
    """Distribution of excess codewords delta needed to reach full rank.

    pmf[d] is the probability decoding completes after exactly k + d
    arrivals; cdf accumulates it.  truncated_mass is the probability beyond
    the delta_max cutoff, and tail_warning flags a cutoff too tight for the
    requested tail tolerance.
    """

    k: int
    q: int
    gamma: Optional[int]
    blockack: bool
    delta_max: int
    pmf: Tuple[float, ...]
    cdf: Tuple[float, ...]
    expected_total: float
    expected_excess: float
    truncated_mass: float
    tail_warning: bool


def _finalize(
    k: int,
    q: int,
    gamma: Optional[int],
    blockack: bool,
    pmf: List[float],
    tail_tolerance: float,
) -> ExcessDistribution:
    cdf = []
    acc = 0.0
    for value in pmf:
        acc += value
        cdf.append(acc)
    expected_total = sum((k + d) * value for d, value in enumerate(pmf))
    truncated = max(0.0, 1.0 - acc)
    return ExcessDistribution(
        k=k,
        q=q,
        gamma=gamma,
        blockack=blockack,
        delta_max=len(pmf) - 1,
        pmf=tuple(pmf),
        cdf=tuple(cdf),
        expected_total=expected_total,
        expected_excess=expected_total - k,
        truncated_mass=truncated,
        tail_warning=truncated > tail_tolerance,
    )


def _dependence_levels(p: ModelParams) -> List[float]:
    top = p.k - 2 if p.blockack else p.k - 1
    return [prob_dependent(u, p) for u in range(p.gamma + 1, top + 1)]


def excess_distribution(p: ModelParams) -> ExcessDistribution:
    """Excess-codeword pmf for a constrained transmitter, single receiver.

    The receiver climbs ranks gamma+1 .. k-1 (the first gamma+1 arrivals
    are innovative with certainty); at rank u each arrival is dependent
    with probability P(D_u) independently, so the excess count is a sum of
    independent geometrics.  pmf[d] multiplies the all-innovative
    probability by the complete homogeneous symmetric sum h_d over the
    level probabilities, computed by the standard in-place DP rather than
    multiset enumeration.  blockack=True drops the final level k-1.
    """
    values = _dependence_levels(p)
    p_all = 1.0
    for v in values:
        p_all *= 1.0 - v
    h = [0.0] * (p.delta_max + 1)
    h[0] = 1.0
    for v in values:
        for d in range(1, p.delta_max + 1):
            h[d] += v * h[d - 1]
    pmf = [p_all * hd for hd in h]
    return _finalize(p.k, p.q, p.gamma, p.blockack, pmf, p.tail_tolerance)


def expected_excess_closed_form(p: ModelParams) -> float:
    """E[delta] = sum_u P(D_u) / (1 - P(D_u)): one geometric mean per level.

    Independent cross-check of the series expectation; the two agree within
    1e-9 whenever the truncated mass is negligible.
    """
    return sum(v / (1.0 - v) for v in _dependence_levels(p))


def baseline_traditional(
    k: int,
    q: int = 2,
    delta_max: int = 64,
    tail_tolerance: float = 1e-9,
) -> ExcessDistribution:
    """Excess-codeword pmf for unconstrained uniform draws, zero included.

    P(full rank within k + d arrivals) is the classic random-matrix product
    prod_{i=0}^{k-1} (1 - q^(i-k-d)); the pmf follows by differencing.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}")
    if delta_max < 0:
        raise ValueError(f"delta_max must be >= 0, got {delta_max}")
    cdf = []
    for d in range(delta_max + 1):
        prob = 1.0
        for i in range(k):
            prob *= 1.0 - float(q) ** (i - k - d)
        cdf.append(prob)
    pmf = [cdf[0]] + [cdf[d] - cdf[d - 1] for d in range(1, delta_max + 1)]
    return _finalize(k, q, None, False, pmf, tail_tolerance)
