"""Selection functions, selective metrics and single-instance removal calculus."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .errors import Underflow, ValidationError, WrongClass
from .ranking import CapAreas, LabeledSample, RankProfile, mann_whitney_auc

Number = Union[float, Fraction]

EDGE_MODES = ("inclusive", "half-open")


@dataclass(frozen=True)
class ScoreBandSelector:
    """Abstain when ``theta_l <= score <= theta_u``.

    With ``edge_mode="half-open"`` the upper edge is exclusive.  A band with
    ``theta_l > theta_u`` is empty and accepts everything; ``(1.0, 0.0)`` is
    the canonical empty band.
    """

    theta_l: float
    theta_u: float
    edge_mode: str = "inclusive"

    def __post_init__(self):
        if self.edge_mode not in EDGE_MODES:
            raise ValidationError(f"unknown edge_mode {self.edge_mode!r}")

    @property
    def is_empty(self) -> bool:
        if self.edge_mode == "inclusive":
            return self.theta_l > self.theta_u
        return self.theta_l >= self.theta_u

    def rejects(self, scores) -> np.ndarray:
        s = np.asarray(scores, dtype=float)
        if self.edge_mode == "inclusive":
            return (self.theta_l <= s) & (s <= self.theta_u)
        return (self.theta_l <= s) & (s < self.theta_u)

    def accepts(self, scores) -> np.ndarray:
        return ~self.rejects(scores)

    def to_dict(self) -> dict:
        return {"kind": "score-band", **asdict(self)}


EMPTY_BAND = ScoreBandSelector(1.0, 0.0)


@dataclass(frozen=True)
class ConfidenceSelector:
    """Accept when the binary softmax confidence ``max(s, 1 - s)`` exceeds ``threshold``."""

    threshold: float

    def rejects(self, scores) -> np.ndarray:
        return ~self.accepts(scores)

    def accepts(self, scores) -> np.ndarray:
        s = np.asarray(scores, dtype=float)
        return confidence(s) > self.threshold

    @property
    def is_empty(self) -> bool:
        return self.threshold < 0.5

    def to_dict(self) -> dict:
        return {"kind": "confidence", "threshold": self.threshold}


Selector = Union[ScoreBandSelector, ConfidenceSelector]


def confidence(scores) -> np.ndarray:
    s = np.asarray(scores, dtype=float)
    return np.maximum(s, 1.0 - s)


def selector_from_dict(d: dict) -> Selector:
    kind = d.get("kind", "score-band")
    if kind == "score-band":
        return ScoreBandSelector(
            float(d["theta_l"]), float(d["theta_u"]), d.get("edge_mode", "inclusive")
        )
    if kind == "confidence":
        return ConfidenceSelector(float(d["threshold"]))
    raise ValidationError(f"unknown selector kind {kind!r}")


def apply_selector(sample: LabeledSample, sel: Selector) -> tuple[LabeledSample, float]:
    """Keep the accepted instances in their original order; return them and the coverage."""
    keep = sel.accepts(sample.scores)
    return sample.take(keep), float(keep.sum()) / sample.n


@dataclass(frozen=True)
class SelectiveReport:
    coverage: float
    selective_auc: Optional[float]
    selective_accuracy: Optional[float]
    selective_risk: Optional[float]
    positive_rate: Optional[float]
    violation: float
    m: int
    m_pos: int
    m_neg: int

    def to_dict(self) -> dict:
        return asdict(self)


def selective_report(
    sample: LabeledSample,
    sel: Selector,
    target_c: float,
    threshold: float = 0.5,
) -> SelectiveReport:
    """Metrics on the accepted region.

    Predicted labels are ``score > threshold``.  Fields that need a non-empty
    (or two-class, for AUC) accepted region are ``None`` otherwise.
    """
    accepted, cov = apply_selector(sample, sel)
    m, m_pos = accepted.n, accepted.n_pos
    auc = acc = risk = pos_rate = None
    if m_pos and m - m_pos:
        auc = mann_whitney_auc(accepted)
    if m:
        pred = (accepted.scores > threshold).astype(np.int8)
        acc = float(np.mean(pred == accepted.labels))
        risk = 1.0 - acc
        pos_rate = m_pos / m
    return SelectiveReport(
        coverage=cov,
        selective_auc=auc,
        selective_accuracy=acc,
        selective_risk=risk,
        positive_rate=pos_rate,
        violation=abs(cov - target_c),
        m=m,
        m_pos=m_pos,
        m_neg=m - m_pos,
    )


def removable_positive(
    sample: LabeledSample, profile: RankProfile, x: int, auc: Number
) -> bool:
    """Whether abstaining on positive ``x`` cannot lower the AUC: ``r'(x)/n <= auc * p_neg``.

    Pass ``auc`` as a Fraction for an exact test at the boundary.
    """
    if sample.labels[x] != 1:
        raise WrongClass(f"instance {x} is not a positive")
    return Fraction(profile.r_prime(x), sample.n) <= Fraction(auc) * Fraction(
        sample.n_neg, sample.n
    )


def removable_negative(
    sample: LabeledSample, profile: RankProfile, x: int, auc: Number
) -> bool:
    """Whether abstaining on negative ``x`` cannot lower the AUC: ``tpr(x) <= auc - 1/n_pos``."""
    if sample.labels[x] != 0:
        raise WrongClass(f"instance {x} is not a negative")
    p = sample.n_pos
    return Fraction(profile.t(x), p) <= Fraction(auc) - Fraction(1, p)


def area_after_remove_positive(
    areas: CapAreas, n: int, n_pos: int, r_prime: int, t_val: int
) -> float:
    """CAP area ``A`` after dropping a positive with ascending rank ``r_prime`` and ``t = t_val``.

    The dropped column and the row above the instance leave the ``n x n_pos``
    grid, which is then rescaled to ``(n - 1) x (n_pos - 1)``.
    """
    if n_pos < 2:
        raise Underflow("removing the only positive leaves no positives")
    lost = ((r_prime - 1) + (t_val - 1) + 0.5) / (n_pos * n)
    return (areas.A + 0.5 - lost) * (n_pos * n) / ((n_pos - 1) * (n - 1)) - 0.5


def area_after_remove_negative(areas: CapAreas, n: int, n_pos: int, t_val: int) -> float:
    if n - n_pos < 2:
        raise Underflow("removing the only negative leaves no negatives")
    return (areas.A + 0.5 - t_val / (n_pos * n)) * n / (n - 1) - 0.5
