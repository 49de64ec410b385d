"""Bound estimation for AUC-improving abstention and quantile combination.

``estimate_thetas_auc`` returns the two score bounds below which positives,
and above which negatives, can be dropped without lowering the empirical AUC.
Sentinels: an upper bound of ``0.0`` means no positive qualifies, a lower
bound of ``1.0`` means no negative qualifies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .errors import EmptyInput
from .ranking import LabeledSample, RankProfile, pair_counts

#: weight of the full-sample estimate in the two-subsample combination
KNIGHT_WEIGHT = 1.0 / math.sqrt(2.0)

THETA_L_SENTINEL = 1.0
THETA_U_SENTINEL = 0.0


def _ceil_count(level: Union[float, Fraction], m: int) -> int:
    x = level * m
    if isinstance(x, Fraction):
        return math.ceil(x)
    # decimal levels such as 1 - 0.8 carry representation error
    r = round(x)
    return int(r) if abs(x - r) < 1e-9 else math.ceil(x)


def empirical_quantile(values: Sequence[float], level: Union[float, Fraction]) -> float:
    """Upper order statistic: the ``ceil(level * m)``-th smallest of ``m`` values.

    ``level <= 0`` returns ``math.inf`` (nothing qualifies); ``level > 1``
    returns the maximum.  Fraction levels are handled exactly.
    """
    v = np.sort(np.asarray(values, dtype=float).ravel())
    if v.size == 0:
        raise EmptyInput("empirical_quantile needs at least one value")
    if level <= 0:
        return math.inf
    k = min(_ceil_count(level, v.size), v.size)
    return float(v[k - 1])


@dataclass(frozen=True)
class ThetaEstimate:
    theta_l: float
    theta_u: float
    auc_used: float
    n: int
    n_pos: int
    #: 1-based order statistics in the ascending scores; 0 / n + 1 mark sentinels
    l_index: int
    u_index: int

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def estimate_thetas_auc(sample: LabeledSample, strict: bool = False) -> ThetaEstimate:
    """Bounds on scores for AUC-improving abstention.

    ``theta_u`` is the ``floor(AUC * p_neg * n)``-th smallest score;
    ``theta_l`` indexes the ascending scores at the number of tpr entries
    strictly above ``AUC - 1/n_pos``.  All comparisons are done on integers.
    """
    u2, p, q = pair_counts(sample, strict)
    n = sample.n
    prof = RankProfile(sample)
    ss = prof.sorted_scores

    # AUC * p_neg * n == u2 / (2 p)
    u = u2 // (2 * p)
    theta_u = float(ss[u - 1]) if u >= 1 else THETA_U_SENTINEL

    # tpr_i > AUC - 1/p  <=>  2 q (p - cum_i + 1) > u2
    cum = prof.cum_pos[1:]
    count = int(np.count_nonzero(2 * q * (p - cum + 1) > u2))
    theta_l = float(ss[count]) if count < n else THETA_L_SENTINEL

    return ThetaEstimate(
        theta_l=theta_l,
        theta_u=theta_u,
        auc_used=u2 / (2 * p * q),
        n=n,
        n_pos=p,
        l_index=count + 1,
        u_index=u,
    )


def theta_l_from_positive_quantile(sample: LabeledSample, strict: bool = False) -> float:
    """Lower bound read off the positive-class scores.

    A negative is droppable when the share of positives above it is at most
    ``AUC - 1/n_pos``, i.e. when it sits at or above the positive-score
    quantile of level ``1 - (AUC - 1/n_pos)``.
    """
    u2, p, q = pair_counts(sample, strict)
    level = 1 - Fraction(u2, 2 * p * q) + Fraction(1, p)
    if level > 1:
        return THETA_L_SENTINEL
    return empirical_quantile(sample.scores[sample.labels == 1], level)


@dataclass(frozen=True)
class CombinedTheta:
    full: ThetaEstimate
    subs: tuple[ThetaEstimate, ThetaEstimate]
    theta_l_star: float
    theta_u_star: float

    def to_dict(self) -> dict:
        return {
            "full": self.full.to_dict(),
            "subs": [s.to_dict() for s in self.subs],
            "theta_l_star": self.theta_l_star,
            "theta_u_star": self.theta_u_star,
        }


def combine_estimates(
    full: float, subs: Sequence[float], literal_sum: bool = False
) -> float:
    """``w * full + (1 - w) * mean(subs)`` with ``w = 1/sqrt(2)``.

    Evaluated in exact rational arithmetic and rounded once, so fixed points
    come back unchanged.  ``literal_sum`` replaces the mean by the plain sum
    (weights then no longer sum to one); it exists only for comparison.
    """
    vals = [full, *subs]
    if not all(math.isfinite(v) for v in vals):
        agg = sum(subs) if literal_sum else sum(subs) / len(subs)
        return KNIGHT_WEIGHT * full + (1 - KNIGHT_WEIGHT) * agg
    w = Fraction(KNIGHT_WEIGHT)
    agg = sum(Fraction(v) for v in subs)
    if not literal_sum:
        agg /= len(subs)
    return float(w * Fraction(full) + (1 - w) * agg)


def combine_thetas(
    full: ThetaEstimate,
    subs: tuple[ThetaEstimate, ThetaEstimate],
    literal_sum: bool = False,
) -> CombinedTheta:
    """Combine full-sample bounds with the bounds of a disjoint two-way split.

    Sentinel bounds take part with their numeric value.
    """
    subs = tuple(subs)
    return CombinedTheta(
        full=full,
        subs=subs,
        theta_l_star=combine_estimates(
            full.theta_l, [s.theta_l for s in subs], literal_sum
        ),
        theta_u_star=combine_estimates(
            full.theta_u, [s.theta_u for s in subs], literal_sum
        ),
    )
