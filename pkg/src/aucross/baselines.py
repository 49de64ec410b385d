"""Comparison methods and the exhaustive oracle over score bands."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
import numpy as np

from .crossfit import (
    SelectiveClassifier,
    cross_fit_scores,
    make_fold_plan,
    rejection_count,
    rejection_window,
    two_way_split,
    window_selector,
)
from .errors import ValidationError, check_coverage
from .ranking import LabeledSample, pair_counts
from .selective import EMPTY_BAND, ConfidenceSelector, ScoreBandSelector, confidence
from .thetas import combine_estimates, empirical_quantile, estimate_thetas_auc
from .trainers import as_trainer, score_checked


def validation_split(y, fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Stratified (train, validation) index split; each class gives at least one validation row."""
    if not 0.0 < fraction < 1.0:
        raise ValidationError(f"validation_fraction must lie in (0, 1), got {fraction}")
    y = np.asarray(y).ravel()
    rng = np.random.default_rng(seed)
    val = []
    for cls in (1, 0):
        idx = rng.permutation(np.flatnonzero(y == cls))
        k = min(max(1, round(fraction * idx.size)), max(idx.size - 1, 0))
        val.append(idx[:k])
    val_idx = np.sort(np.concatenate(val))
    mask = np.ones(y.size, dtype=bool)
    mask[val_idx] = False
    return np.flatnonzero(mask), val_idx


def plug_in_threshold(scores, c: float) -> float:
    """Confidence threshold at the ``1 - c`` quantile; ``-inf`` (accept all) when ``c == 1``."""
    c = check_coverage(c)
    level = 1.0 - c
    if level <= 0:
        return -math.inf
    return empirical_quantile(confidence(scores), level)


def plug_in_auc_selector(
    val: LabeledSample, c: float, midpoint: str = "rank", window: str = "fixed"
) -> tuple[ScoreBandSelector, dict]:
    """Band from the bounds of a single validation sample, placed like AUCross."""
    c = check_coverage(c)
    th = estimate_thetas_auc(val)
    ss = np.sort(val.scores, kind="stable")
    win = rejection_window(ss, th.theta_l, th.theta_u, c, midpoint, window)
    diag = {"thetas": th.to_dict(), "mid": win.mid, "lo": win.lo, "hi": win.hi, "n": val.n}
    return window_selector(ss, win), diag


def scross_threshold(
    scores, c: float, seed: int = 0, split=None
) -> tuple[float, dict]:
    """Confidence threshold combined from the full sample and a two-way split."""
    s = np.asarray(scores, dtype=float)
    full = plug_in_threshold(s, c)
    halves = split if split is not None else two_way_split(s.size, seed)
    subs = [plug_in_threshold(s[np.asarray(h, dtype=np.int64)], c) for h in halves]
    theta = combine_estimates(full, subs)
    return theta, {"full": full, "subs": subs, "theta_star": theta}


def _fit_on_validation_split(X, y, trainer, validation_fraction, seed):
    X = np.asarray(X)
    y = np.asarray(y).ravel()
    trainer = as_trainer(trainer)
    tr, va = validation_split(y, validation_fraction, seed)
    scorer = trainer.fit(X[tr], y[tr], seed=seed)
    val_scores = score_checked(scorer, X[va])
    return scorer, LabeledSample(val_scores, y[va])


def plug_in(
    X, y, trainer, c: float, validation_fraction: float = 0.1, seed: int = 0
) -> SelectiveClassifier:
    """Softmax-confidence plug-in rule calibrated on a held-out validation split."""
    c = check_coverage(c)
    scorer, val = _fit_on_validation_split(X, y, trainer, validation_fraction, seed)
    theta = plug_in_threshold(val.scores, c)
    diag = {"method": "plugin", "c": c, "seed": seed, "theta": theta, "n_val": val.n}
    return SelectiveClassifier(scorer, ConfidenceSelector(theta), diag)


def plug_in_auc(
    X, y, trainer, c: float, validation_fraction: float = 0.1, seed: int = 0
) -> SelectiveClassifier:
    c = check_coverage(c)
    scorer, val = _fit_on_validation_split(X, y, trainer, validation_fraction, seed)
    sel, diag = plug_in_auc_selector(val, c)
    diag.update(method="pluginauc", c=c, seed=seed)
    return SelectiveClassifier(scorer, sel, diag)


def scross(
    X, y, trainer, c: float, K: int = 5, seed: int = 0, n_jobs: int = 1
) -> SelectiveClassifier:
    """Cross-fitted plug-in rule with the combined full/half-sample quantile."""
    c = check_coverage(c)
    trainer = as_trainer(trainer)
    y = np.asarray(y).ravel()
    plan = make_fold_plan(y, K, seed)
    oof = cross_fit_scores(X, y, trainer, plan, seed=seed, n_jobs=n_jobs)
    theta, diag = scross_threshold(oof.scores, c, seed)
    diag.update(method="scross", c=c, K=K, seed=seed)
    scorer = trainer.fit(np.asarray(X), y, seed=seed)
    return SelectiveClassifier(scorer, ConfidenceSelector(theta), diag)


@dataclass(frozen=True)
class OracleResult:
    best_selector: ScoreBandSelector
    best_auc: float
    achieved_coverage: float
    candidates_evaluated: int
    best_auc_exact: Fraction = Fraction(0)

    def to_dict(self) -> dict:
        return {
            "selector": self.best_selector.to_dict(),
            "auc": self.best_auc,
            "coverage": self.achieved_coverage,
            "candidates_evaluated": self.candidates_evaluated,
        }


@dataclass(frozen=True)
class _Groups:
    values: np.ndarray  # distinct scores, ascending
    p: np.ndarray
    q: np.ndarray

    @classmethod
    def of(cls, sample: LabeledSample) -> "_Groups":
        values, inv = np.unique(sample.scores, return_inverse=True)
        p = np.bincount(inv, weights=sample.labels, minlength=values.size).astype(np.int64)
        size = np.bincount(inv, minlength=values.size).astype(np.int64)
        return cls(values, p, size - p)


def _key(auc: Fraction, removed: int, width: float, i: int):
    # larger is better: AUC, then coverage, then narrower band, then lower edge
    return (auc, -removed, -width, -i)


def _best_from_lower_incremental(i, g: _Groups, pre, U2, P, N, max_removed):
    Pp, Np, Ap, Bp = pre
    d = g.values.size
    sizes = Pp + Np  # prefix of group sizes
    # largest j with removed(i..j) <= max_removed
    j_end = int(np.searchsorted(sizes, sizes[i] + max_removed, side="right")) - 2
    if j_end < i:
        return None, 0
    j = np.arange(i, min(j_end, d - 1) + 1)
    rem_p = Pp[j + 1] - Pp[i]
    rem_n = Np[j + 1] - Np[i]
    u2 = U2 - (Ap[j + 1] - Ap[i]) + (Bp[j + 1] - Bp[i]) - 2 * Np[i] * rem_p
    mp, mn = P - rem_p, N - rem_n
    ok = (mp > 0) & (mn > 0)
    evaluated = int(j.size)
    if not ok.any():
        return None, evaluated
    denom = 2 * mp * mn
    auc = np.where(ok, u2 / np.where(ok, denom, 1), -np.inf)
    top = auc.max()
    best = None
    for t in np.flatnonzero(auc >= top * (1 - 1e-12)):
        frac = Fraction(int(u2[t]), int(denom[t]))
        cand = _key(frac, int(rem_p[t] + rem_n[t]), float(g.values[j[t]] - g.values[i]), i)
        if best is None or cand > best[0]:
            best = (cand, i, int(j[t]))
    return best, evaluated


def _best_from_lower_naive(i, g: _Groups, sample, max_removed, strict):
    best = None
    evaluated = 0
    for j in range(i, g.values.size):
        removed = int(g.p[i : j + 1].sum() + g.q[i : j + 1].sum())
        if removed > max_removed:
            break
        evaluated += 1
        keep = ~((sample.scores >= g.values[i]) & (sample.scores <= g.values[j]))
        acc = sample.take(keep)
        if acc.n_pos == 0 or acc.n_neg == 0:
            continue
        u2, mp, mn = pair_counts(acc, strict)
        cand = _key(Fraction(u2, 2 * mp * mn), removed, float(g.values[j] - g.values[i]), i)
        if best is None or cand > best[0]:
            best = (cand, i, j)
    return best, evaluated


def oracle_search(
    sample: LabeledSample,
    c: float,
    mode: str = "incremental",
    strict: bool = False,
    n_jobs: int = 1,
) -> OracleResult:
    """Best score band (endpoints at observed scores) subject to coverage >= c.

    Needs the true labels, so it only serves as an evaluation reference.
    Ties in AUC go to higher coverage, then the narrower band.  ``mode``
    ``"naive"`` recomputes the AUC of every candidate from scratch.
    """
    c = check_coverage(c)
    u2_full, P, N = pair_counts(sample, strict)
    n = sample.n
    max_removed = rejection_count(n, c)
    g = _Groups.of(sample)
    tie = 0 if strict else 1
    d = g.values.size

    if mode == "incremental":
        Pp = np.concatenate(([0], np.cumsum(g.p)))
        Np = np.concatenate(([0], np.cumsum(g.q)))
        Nb = Np[:-1]
        Pabove = P - Pp[1:]
        pq = tie * g.p * g.q
        a = 2 * g.p * Nb + pq + 2 * g.q * Pabove + pq
        b = 2 * g.p * Nb + pq
        pre = (Pp, Np, np.concatenate(([0], np.cumsum(a))), np.concatenate(([0], np.cumsum(b))))

        def search(i):
            return _best_from_lower_incremental(i, g, pre, u2_full, P, N, max_removed)

    elif mode == "naive":

        def search(i):
            return _best_from_lower_naive(i, g, sample, max_removed, strict)

    else:
        raise ValidationError(f"unknown oracle mode {mode!r}")

    if n_jobs == 1:
        results = [search(i) for i in range(d)]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(search, range(d)))

    best_key = _key(Fraction(u2_full, 2 * P * N), 0, -math.inf, 1)
    best_sel: ScoreBandSelector = EMPTY_BAND
    evaluated = 1
    for res, cnt in results:
        evaluated += cnt
        if res is not None and res[0] > best_key:
            best_key = res[0]
            best_sel = ScoreBandSelector(float(g.values[res[1]]), float(g.values[res[2]]))
    auc = best_key[0]
    return OracleResult(
        best_selector=best_sel,
        best_auc=float(auc),
        achieved_coverage=(n + best_key[1]) / n,
        candidates_evaluated=evaluated,
        best_auc_exact=auc,
    )

