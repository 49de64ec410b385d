"""Cross-fitted induction of an AUC-selective classifier.

Out-of-fold scores stand in for a validation set: every training instance
is scored by a model that never saw it, the abstention bounds are estimated
on those scores (full sample plus a two-way split, combined), and a
rejection window of ``floor(n * (1 - c))`` sorted ranks is centred between
the combined bounds.  The scorer itself is refitted on all the data.
"""
from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from .errors import DegenerateSample, FoldDegenerate, ValidationError, check_coverage
from .ranking import LabeledSample
from .selective import EMPTY_BAND, ScoreBandSelector, Selector
from .thetas import combine_thetas, estimate_thetas_auc
from .trainers import Scorer, as_trainer, score_checked


@dataclass(frozen=True)
class FoldPlan:
    K: int
    assignment: np.ndarray
    stratified: bool = True

    def test_index(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.assignment == k)

    def train_index(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.assignment != k)


def make_fold_plan(y, K: int, seed: int = 0) -> FoldPlan:
    """Stratified K-fold assignment.

    Each class is shuffled and dealt round-robin, the negatives continuing
    where the positives stopped, so fold sizes and per-fold positive counts
    each differ by at most one.
    """
    y = np.asarray(y).ravel()
    if K < 2:
        raise ValidationError(f"need at least 2 folds, got {K}")
    if K > y.size:
        raise FoldDegenerate(f"{K} folds for {y.size} instances")
    rng = np.random.default_rng(seed)
    assignment = np.empty(y.size, dtype=np.int64)
    offset = 0
    for cls in (1, 0):
        idx = rng.permutation(np.flatnonzero(y == cls))
        assignment[idx] = (np.arange(idx.size) + offset) % K
        offset += idx.size
    return FoldPlan(K, assignment)


def fold_seeds(seed: int, K: int) -> list[int]:
    return [int(s.generate_state(1)[0]) for s in np.random.SeedSequence(seed).spawn(K)]


def cross_fit_scores(
    X,
    y,
    trainer,
    plan: FoldPlan,
    seed: int = 0,
    n_jobs: int = 1,
) -> LabeledSample:
    """Out-of-fold scores, one per instance, in input order."""
    X = np.asarray(X)
    y = np.asarray(y).ravel()
    trainer = as_trainer(trainer)
    for k in range(plan.K):
        y_tr = y[plan.train_index(k)]
        if plan.test_index(k).size == 0:
            raise FoldDegenerate(f"fold {k} is empty")
        if y_tr.min() == y_tr.max():
            raise FoldDegenerate(f"training complement of fold {k} holds one class")
    seeds = fold_seeds(seed, plan.K)

    def run(k: int) -> tuple[np.ndarray, np.ndarray]:
        tr, te = plan.train_index(k), plan.test_index(k)
        scorer = trainer.fit(X[tr], y[tr], seed=seeds[k])
        return te, score_checked(scorer, X[te])

    oof = np.empty(y.size)
    if n_jobs == 1:
        parts = [run(k) for k in range(plan.K)]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(run, range(plan.K)))
    for te, s in parts:
        oof[te] = s
    return LabeledSample(oof, y)


def two_way_split(n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded shuffle then halving; the first half takes the odd element."""
    perm = np.random.default_rng(seed).permutation(n)
    h = (n + 1) // 2
    return np.sort(perm[:h]), np.sort(perm[h:])


def rejection_count(n: int, c: float) -> int:
    x = n * (1.0 - c)
    r = round(x)
    return int(r) if abs(x - r) < 1e-9 else math.floor(x)


@dataclass(frozen=True)
class RejectionWindow:
    mid: int
    delta: float
    lo: int  # first rejected sorted position (0-based)
    hi: int  # one past the last rejected position


def rejection_window(
    sorted_scores: np.ndarray,
    theta_l: float,
    theta_u: float,
    c: float,
    midpoint: str = "rank",
    window: str = "fixed",
) -> RejectionWindow:
    """Place the rejection window over ascending sorted scores.

    ``midpoint="rank"`` centres it halfway between the insertion ranks of the
    two bounds; ``"literal"`` uses ``floor(n * (theta_l + theta_u) / 2)``.
    ``window="fixed"`` rejects exactly ``floor(n * (1 - c))`` positions,
    shifting rather than truncating at the ends; ``"inclusive"`` rejects the
    inclusive 1-based range ``max(1, mid - delta) .. min(mid + delta, n)``.
    """
    ss = np.asarray(sorted_scores)
    n = ss.size
    if midpoint == "rank":
        mid = (
            int(np.searchsorted(ss, theta_l, side="left"))
            + int(np.searchsorted(ss, theta_u, side="left"))
        ) // 2
    elif midpoint == "literal":
        mid = math.floor(n * (theta_u + theta_l) / 2)
    else:
        raise ValidationError(f"unknown midpoint mode {midpoint!r}")
    delta = n * (1.0 - c) / 2
    if window == "fixed":
        w = rejection_count(n, c)
        lo = mid - (w + 1) // 2
        lo = min(max(lo, 0), n - w)
        hi = lo + w
    elif window == "inclusive":
        lo = max(1, math.floor(mid - delta)) - 1
        hi = min(math.floor(mid + delta), n)
        hi = max(hi, lo)
    else:
        raise ValidationError(f"unknown window mode {window!r}")
    return RejectionWindow(mid, delta, lo, hi)


def window_selector(sorted_scores: np.ndarray, win: RejectionWindow) -> ScoreBandSelector:
    if win.hi <= win.lo:
        return EMPTY_BAND
    return ScoreBandSelector(float(sorted_scores[win.lo]), float(sorted_scores[win.hi - 1]))


def _digest(a: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(a, dtype=np.float64).tobytes()).hexdigest()[:16]


def aucross_selector(
    sample: LabeledSample,
    c: float,
    seed: int = 0,
    split: Optional[tuple[Sequence[int], Sequence[int]]] = None,
    midpoint: str = "rank",
    window: str = "fixed",
    literal_sum: bool = False,
) -> tuple[ScoreBandSelector, dict]:
    """Selector from (out-of-fold) scores: combined bounds, then the coverage window.

    ``split`` overrides the seeded two-way split with explicit index sets.
    """
    c = check_coverage(c)
    full = estimate_thetas_auc(sample)
    halves = split if split is not None else two_way_split(sample.n, seed)
    subs = []
    for part in halves:
        half = sample.take(np.asarray(part, dtype=np.int64))
        if half.n_pos == 0 or half.n_neg == 0:
            raise DegenerateSample("a half of the two-way split holds one class")
        subs.append(estimate_thetas_auc(half))
    combined = combine_thetas(full, tuple(subs), literal_sum=literal_sum)
    ss = np.sort(sample.scores, kind="stable")
    win = rejection_window(
        ss, combined.theta_l_star, combined.theta_u_star, c, midpoint, window
    )
    sel = window_selector(ss, win)
    diagnostics = {
        "combined": combined.to_dict(),
        "mid": win.mid,
        "delta": win.delta,
        "lo": win.lo,
        "hi": win.hi,
        "n": sample.n,
        "scores_digest": _digest(sample.scores),
    }
    return sel, diagnostics


@dataclass
class SelectiveClassifier:
    """A fitted scorer paired with its selection function."""

    scorer: Scorer
    selector: Selector
    diagnostics: dict[str, Any] = field(default_factory=dict)

    def predict_proba(self, X) -> np.ndarray:
        return score_checked(self.scorer, X)

    def select(self, X) -> np.ndarray:
        """1 where a prediction is issued, 0 where the classifier abstains."""
        return self.selector.accepts(self.predict_proba(X)).astype(np.int8)

    def predict(self, X, threshold: float = 0.5) -> np.ndarray:
        return (self.predict_proba(X) > threshold).astype(np.int8)

    def to_dict(self) -> dict:
        out = {"selector": self.selector.to_dict(), "diagnostics": self.diagnostics}
        if hasattr(self.scorer, "to_dict"):
            out["scorer"] = self.scorer.to_dict()
        return out


def fit_aucross(
    X,
    y,
    trainer,
    c: float,
    K: int = 5,
    seed: int = 0,
    n_jobs: int = 1,
    **placement,
) -> SelectiveClassifier:
    """Cross-fit ``trainer``, derive the abstention band, refit on everything.

    ``placement`` is forwarded to :func:`aucross_selector` (``midpoint``,
    ``window``, ``literal_sum``, ``split``).
    """
    c = check_coverage(c)
    trainer = as_trainer(trainer)
    y = np.asarray(y).ravel()
    plan = make_fold_plan(y, K, seed)
    oof = cross_fit_scores(X, y, trainer, plan, seed=seed, n_jobs=n_jobs)
    sel, diag = aucross_selector(oof, c, seed=seed, **placement)
    diag.update(method="aucross", c=c, K=K, seed=seed)
    scorer = trainer.fit(np.asarray(X), y, seed=seed)
    return SelectiveClassifier(scorer, sel, diag)
