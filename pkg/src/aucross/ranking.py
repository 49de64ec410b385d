"""Rank statistics on a labeled score sample.

Everything here is exact where it can be: pair counts are accumulated as
integers and only divided at the end, so small hand-checked samples give
bit-exact fractions.  The ranking of instances follows a stable sort on the
original index, which makes every derived quantity deterministic under ties.

Notation used throughout the package (descending order of scores):

* ``r(x)``  1-based rank under non-ascending scores,
* ``r'(x) = n - r(x) + 1``  1-based rank under ascending scores,
* ``t(x)``  positives at descending ranks ``1..r(x)`` (``x`` included),
* ``tpr(x) = t(x) / n_pos``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DegenerateSample, ValidationError


@dataclass(frozen=True, eq=False)
class LabeledSample:
    """Paired scores in ``[0, 1]`` and binary labels."""

    scores: np.ndarray
    labels: np.ndarray

    def __init__(
        self, scores: Sequence[float], labels: Sequence[int], allow_empty: bool = False
    ):
        s = np.asarray(scores, dtype=float).ravel()
        y_raw = np.asarray(labels).ravel()
        if s.shape != y_raw.shape:
            raise ValidationError(
                f"scores and labels differ in length ({s.size} vs {y_raw.size})"
            )
        if s.size == 0 and not allow_empty:
            raise ValidationError("a sample needs at least one instance")
        if s.size and (not np.all(np.isfinite(s)) or s.min() < 0.0 or s.max() > 1.0):
            raise ValidationError("scores must be finite and lie in [0, 1]")
        if not np.all((y_raw == 0) | (y_raw == 1)):
            raise ValidationError("labels must be 0 or 1")
        s.setflags(write=False)
        y = y_raw.astype(np.int8)
        y.setflags(write=False)
        object.__setattr__(self, "scores", s)
        object.__setattr__(self, "labels", y)

    def __len__(self) -> int:
        return int(self.scores.size)

    def __repr__(self) -> str:
        return f"LabeledSample(n={self.n}, n_pos={self.n_pos})"

    @property
    def n(self) -> int:
        return int(self.scores.size)

    @cached_property
    def n_pos(self) -> int:
        return int(self.labels.sum())

    @property
    def n_neg(self) -> int:
        return self.n - self.n_pos

    @property
    def p_pos(self) -> float:
        return self.n_pos / self.n

    @property
    def p_neg(self) -> float:
        return self.n_neg / self.n

    def take(self, index) -> "LabeledSample":
        """Subsample by integer index or boolean mask, keeping order.

        The result may be empty.
        """
        return LabeledSample(self.scores[index], self.labels[index], allow_empty=True)

    def require_both_classes(self) -> None:
        if self.n_pos == 0 or self.n_neg == 0:
            raise DegenerateSample(
                f"sample has n_pos={self.n_pos}, n_neg={self.n_neg}; AUC is undefined"
            )


class RankProfile:
    """Ascending-score ordering with cumulative positive counts.

    ``cum_pos[i]`` is the number of positives among the ``i`` lowest-scored
    instances, so ``cum_pos`` has ``n + 1`` entries.
    """

    def __init__(self, sample: LabeledSample):
        self.sample = sample
        self.order = np.argsort(sample.scores, kind="stable")
        self.sorted_scores = sample.scores[self.order]
        self.sorted_labels = sample.labels[self.order]
        self.cum_pos = np.concatenate(([0], np.cumsum(self.sorted_labels, dtype=np.int64)))
        rank_asc = np.empty(sample.n, dtype=np.int64)
        rank_asc[self.order] = np.arange(1, sample.n + 1)
        self._rank_asc = rank_asc

    @property
    def n(self) -> int:
        return self.sample.n

    @property
    def n_pos(self) -> int:
        return int(self.cum_pos[-1])

    def r_prime(self, i=None):
        """Ascending 1-based rank of instance ``i`` (all instances if omitted)."""
        return self._rank_asc if i is None else int(self._rank_asc[i])

    def r(self, i=None):
        if i is None:
            return self.n + 1 - self._rank_asc
        return self.n + 1 - int(self._rank_asc[i])

    def t(self, i=None):
        out = self.n_pos - self.cum_pos[np.asarray(self.r_prime(i)) - 1]
        return out if i is None else int(out)

    def tpr(self, i=None):
        if self.n_pos == 0:
            raise DegenerateSample("tpr is undefined without positives")
        return self.t(i) / self.n_pos

    def tpr_ascending(self) -> np.ndarray:
        """Non-increasing ``1 - cum_pos / n_pos`` along the ascending order."""
        return 1.0 - self.cum_pos[1:] / self.n_pos


def profile(sample: LabeledSample) -> RankProfile:
    return RankProfile(sample)


def pair_counts(sample: LabeledSample, strict: bool = False) -> tuple[int, int, int]:
    """Return ``(u2, n_pos, n_neg)`` with ``u2`` twice the Mann-Whitney count.

    A concordant (positive above negative) pair adds 2 to ``u2``; a tied pair
    adds 1, or 0 when ``strict``.
    """
    sample.require_both_classes()
    s = sample.scores
    y = sample.labels
    order = np.argsort(s, kind="stable")
    s_sorted = s[order]
    y_sorted = y[order].astype(np.int64)
    # group boundaries of equal scores
    starts = np.flatnonzero(np.r_[True, s_sorted[1:] != s_sorted[:-1]])
    pos_in_group = np.add.reduceat(y_sorted, starts)
    size = np.diff(np.r_[starts, s_sorted.size])
    neg_in_group = size - pos_in_group
    neg_below = np.cumsum(neg_in_group) - neg_in_group
    u2 = 2 * int(np.dot(pos_in_group, neg_below))
    if not strict:
        u2 += int(np.dot(pos_in_group, neg_in_group))
    return u2, sample.n_pos, sample.n_neg


def auc_fraction(sample: LabeledSample, strict: bool = False) -> Fraction:
    u2, p, q = pair_counts(sample, strict)
    return Fraction(u2, 2 * p * q)


def mann_whitney_auc(sample: LabeledSample, strict: bool = False) -> float:
    """Empirical AUC as the normalised Mann-Whitney statistic.

    Ties between a positive and a negative score count 1/2 unless ``strict``,
    in which case only strictly concordant pairs count.

    Raises DegenerateSample when the sample holds a single class.
    """
    u2, p, q = pair_counts(sample, strict)
    return u2 / (2 * p * q)


def gini(sample: LabeledSample, strict: bool = False) -> float:
    u2, p, q = pair_counts(sample, strict)
    return (u2 - p * q) / (p * q)


def cap_points(sample: LabeledSample) -> np.ndarray:
    """Cumulative accuracy profile as an ``(n + 1, 2)`` array.

    Row ``i`` is ``(i / n, tpr at descending rank i)``.
    """
    if sample.n_pos == 0:
        raise DegenerateSample("the CAP needs at least one positive")
    prof = RankProfile(sample)
    n = sample.n
    i = np.arange(n + 1)
    t = prof.n_pos - prof.cum_pos[n - i]
    return np.column_stack((i / n, t / prof.n_pos))


@dataclass(frozen=True)
class CapAreas:
    """``A``: CAP area above the diagonal; ``B``: gap to the perfect CAP.

    ``A`` is negative for rankings worse than random.
    """

    A: float
    B: float

    @property
    def gini(self) -> float:
        return self.A / (self.A + self.B)


def cap_areas(sample: LabeledSample) -> CapAreas:
    sample.require_both_classes()
    prof = RankProfile(sample)
    n, p = sample.n, prof.n_pos
    t = p - prof.cum_pos[::-1]  # t at descending ranks 0..n
    twice_area = int(np.sum(t[:-1] + t[1:]))  # trapezoids in an n x n_pos grid
    A = Fraction(twice_area, 2 * n * p) - Fraction(1, 2)
    B = Fraction(sample.n_neg, 2 * n) - A
    return CapAreas(float(A), float(B))
