"""Bootstrap evaluation, risk-coverage curves, synthetic data and report output.

Report schema
-------------
JSON (``write_report_json``)::

    {"config": {...},
     "results": {<method>: {<c as str>: [<row>, ...]}}}

where each row carries ``seed``, ``c``, the bootstrap means and standard
deviations of every metric (``<metric>_mean`` / ``<metric>_std``), the
point estimates on the full test set (``coverage``, ``selective_auc``),
``violation``, ``auc_omitted`` and, when an oracle was run,
``oracle_auc`` and ``oracle_gap``.  The CSV form (``write_report_csv``)
holds the same rows flattened, with a leading ``method`` column.
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .baselines import (
    oracle_search,
    plug_in_auc_selector,
    plug_in_threshold,
    scross_threshold,
    validation_split,
)
from .crossfit import aucross_selector, cross_fit_scores, make_fold_plan
from .errors import EmptyInput, InvalidSpec, ValidationError, check_coverage
from .ranking import LabeledSample
from .selective import ConfidenceSelector, Selector, SelectiveReport, selective_report
from .trainers import LogisticTrainer, as_trainer, score_checked

METRICS = ("coverage", "selective_auc", "selective_accuracy", "selective_risk", "positive_rate")

#: target coverages of the experimental grid
C_GRID = (0.99, 0.95, 0.90, 0.85, 0.80, 0.75)

METHODS = ("aucross", "plugin", "pluginauc", "scross")


@dataclass(frozen=True)
class BootstrapSummary:
    mean: dict
    std: dict
    B: int
    seed: int
    c: float
    auc_omitted: int

    @property
    def violation(self) -> float:
        return abs(self.mean["coverage"] - self.c)

    def to_dict(self) -> dict:
        out = {"B": self.B, "seed": self.seed, "c": self.c, "auc_omitted": self.auc_omitted}
        for k in METRICS:
            out[f"{k}_mean"] = self.mean.get(k)
            out[f"{k}_std"] = self.std.get(k)
        out["violation"] = self.violation
        return out


def resample_indices(n: int, B: int, seed: int) -> list[np.ndarray]:
    """One independent stream per resample, so any evaluation order gives the same draws."""
    children = np.random.SeedSequence(seed).spawn(B)
    return [np.random.default_rng(ch).integers(0, n, size=n) for ch in children]


def bootstrap_evaluate(
    test: LabeledSample,
    sel: Selector,
    c: float,
    B: int = 1000,
    seed: int = 0,
    threshold: float = 0.5,
    n_jobs: int = 1,
    resamples: Optional[Sequence[np.ndarray]] = None,
) -> BootstrapSummary:
    """Mean and standard deviation of the selective metrics over ``B`` resamples.

    Resamples whose accepted region holds a single class contribute no AUC;
    their number is reported as ``auc_omitted``.  ``resamples`` replaces the
    random draws with explicit index arrays.
    """
    if test.n == 0:
        raise EmptyInput("cannot bootstrap an empty test sample")
    if resamples is None:
        if B < 1:
            raise ValidationError(f"B must be at least 1, got {B}")
        resamples = resample_indices(test.n, B, seed)
    B = len(resamples)

    def one(idx) -> SelectiveReport:
        return selective_report(test.take(np.asarray(idx)), sel, c, threshold)

    if n_jobs == 1:
        reports = [one(idx) for idx in resamples]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            reports = list(pool.map(one, resamples))

    mean, std = {}, {}
    omitted = 0
    for k in METRICS:
        vals = np.array([getattr(r, k) for r in reports if getattr(r, k) is not None], dtype=float)
        if k == "selective_auc":
            omitted = B - vals.size
        mean[k] = float(vals.mean()) if vals.size else None
        std[k] = float(vals.std()) if vals.size else None
    return BootstrapSummary(mean, std, B, seed, float(c), omitted)


@dataclass(frozen=True)
class CurveRow:
    c: float
    coverage: float
    selective_risk: Optional[float]
    selective_auc: Optional[float]


def risk_coverage_curve(
    sample: LabeledSample,
    selectors: Iterable[tuple[float, Selector]],
    threshold: float = 0.5,
) -> list[CurveRow]:
    """One row per ``(c, selector)`` with the realized coverage on ``sample``."""
    rows = []
    prev = math.inf
    for c, sel in selectors:
        if c > prev:
            raise ValidationError("selectors must be ordered by target coverage, descending")
        prev = c
        rep = selective_report(sample, sel, c, threshold)
        rows.append(CurveRow(c, rep.coverage, rep.selective_risk, rep.selective_auc))
    return rows


@dataclass(frozen=True)
class SyntheticSpec:
    """Two Gaussian classes with a shared isotropic covariance.

    The class means are ``separation * sigma`` apart, spread evenly over the
    feature axes.
    """

    n: int
    positive_rate: float = 0.25
    n_features: int = 2
    separation: float = 1.5
    sigma: float = 1.0
    seed: int = 0

    def validate(self) -> None:
        if self.n < 2:
            raise InvalidSpec(f"n must be at least 2, got {self.n}")
        if not 0.0 < self.positive_rate < 1.0:
            raise InvalidSpec("positive_rate must lie strictly between 0 and 1")
        if self.n_features < 1 or self.sigma <= 0 or self.separation < 0:
            raise InvalidSpec("need n_features >= 1, sigma > 0 and separation >= 0")

    @property
    def bayes_auc(self) -> float:
        """Population AUC of the Bayes scores, ``Phi(separation / sqrt(2))``."""
        return 0.5 * (1.0 + math.erf(self.separation / 2.0))


@dataclass(frozen=True)
class SyntheticData:
    X: np.ndarray
    y: np.ndarray
    bayes_scores: np.ndarray

    def split(self, n_first: int) -> tuple["SyntheticData", "SyntheticData"]:
        a = SyntheticData(self.X[:n_first], self.y[:n_first], self.bayes_scores[:n_first])
        b = SyntheticData(self.X[n_first:], self.y[n_first:], self.bayes_scores[n_first:])
        return a, b


def generate_synthetic(spec: SyntheticSpec) -> SyntheticData:
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    y = (rng.random(spec.n) < spec.positive_rate).astype(np.int64)
    if y.min() == y.max():
        raise InvalidSpec("the generated sample holds a single class; raise n")
    shift = np.full(spec.n_features, spec.separation * spec.sigma / math.sqrt(spec.n_features))
    X = rng.normal(0.0, spec.sigma, size=(spec.n, spec.n_features)) + np.outer(y, shift)
    # exact posterior P(y=1 | x)
    logit = (
        math.log(spec.positive_rate / (1 - spec.positive_rate))
        + X @ shift / spec.sigma**2
        - shift @ shift / (2 * spec.sigma**2)
    )
    bayes = 1.0 / (1.0 + np.exp(-np.clip(logit, -500, 500)))
    return SyntheticData(X, y, bayes)


def grid_selectors(
    X,
    y,
    method: str,
    c_grid: Sequence[float],
    trainer=None,
    K: int = 5,
    seed: int = 0,
    validation_fraction: float = 0.1,
    n_jobs: int = 1,
):
    """Fit ``method`` once and derive its selector for every target coverage.

    Returns ``(scorer, {c: selector})``.  The expensive parts (cross-fitting
    or the validation-split fit) do not depend on ``c`` and are shared.
    """
    trainer = as_trainer(trainer if trainer is not None else LogisticTrainer())
    X = np.asarray(X)
    y = np.asarray(y).ravel()
    c_grid = [check_coverage(c) for c in c_grid]
    if method in ("aucross", "scross"):
        plan = make_fold_plan(y, K, seed)
        oof = cross_fit_scores(X, y, trainer, plan, seed=seed, n_jobs=n_jobs)
        if method == "aucross":
            sels = {c: aucross_selector(oof, c, seed=seed)[0] for c in c_grid}
        else:
            sels = {c: ConfidenceSelector(scross_threshold(oof.scores, c, seed)[0]) for c in c_grid}
        scorer = trainer.fit(X, y, seed=seed)
    elif method in ("plugin", "pluginauc"):
        tr, va = validation_split(y, validation_fraction, seed)
        scorer = trainer.fit(X[tr], y[tr], seed=seed)
        val = LabeledSample(score_checked(scorer, X[va]), y[va])
        if method == "plugin":
            sels = {c: ConfidenceSelector(plug_in_threshold(val.scores, c)) for c in c_grid}
        else:
            sels = {c: plug_in_auc_selector(val, c)[0] for c in c_grid}
    else:
        raise ValidationError(f"unknown method {method!r}")
    return scorer, sels


@dataclass
class StudyConfig:
    seeds: Sequence[int] = (1, 2, 3, 4, 5)
    c_grid: Sequence[float] = C_GRID
    n_train: int = 5000
    n_test: int = 2000
    methods: Sequence[str] = ("aucross",)
    K: int = 5
    B: int = 1000
    positive_rate: float = 0.25
    n_features: int = 2
    separation: float = 1.5
    with_oracle: bool = True
    n_jobs: int = 1


@dataclass
class StudyResult:
    config: StudyConfig
    rows: dict = field(default_factory=dict)  # method -> c -> list of row dicts

    def cell(self, method: str, c: float) -> list[dict]:
        return self.rows[method][c]

    def to_dict(self) -> dict:
        return {
            "config": {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self.config).items()},
            "results": {
                m: {repr(float(c)): rows for c, rows in by_c.items()} for m, by_c in self.rows.items()
            },
        }


def run_synthetic_study(config: Optional[StudyConfig] = None) -> StudyResult:
    """Train on two-Gaussian data, evaluate every method on a held-out test set."""
    config = config or StudyConfig()
    result = StudyResult(config, {m: {c: [] for c in config.c_grid} for m in config.methods})
    for seed in config.seeds:
        spec = SyntheticSpec(
            config.n_train + config.n_test,
            config.positive_rate,
            config.n_features,
            config.separation,
            seed=seed,
        )
        train, test = generate_synthetic(spec).split(config.n_train)
        oracle = {}
        for method in config.methods:
            scorer, sels = grid_selectors(
                train.X, train.y, method, config.c_grid, K=config.K, seed=seed, n_jobs=config.n_jobs
            )
            test_sample = LabeledSample(score_checked(scorer, test.X), test.y)
            for c in config.c_grid:
                sel = sels[c]
                point = selective_report(test_sample, sel, c)
                boot = bootstrap_evaluate(test_sample, sel, c, B=config.B, seed=seed, n_jobs=config.n_jobs)
                row = {"seed": seed, **boot.to_dict(), "coverage": point.coverage,
                       "selective_auc": point.selective_auc, "selector": sel.to_dict()}
                if config.with_oracle:
                    key = (test_sample.scores.tobytes(), c)
                    if key not in oracle:
                        oracle[key] = oracle_search(test_sample, c)
                    row["oracle_auc"] = oracle[key].best_auc
                    row["oracle_gap"] = (
                        oracle[key].best_auc - point.selective_auc
                        if point.selective_auc is not None
                        else None
                    )
                result.rows[method][c].append(row)
    return result


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"cannot serialise {type(o).__name__}")


def dumps(obj) -> str:
    # repr-based float output is the shortest string that round-trips exactly
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default, allow_nan=True)


def write_report_json(result: StudyResult, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(result.to_dict()))
        fh.write("\n")


def flat_rows(result: StudyResult) -> list[dict]:
    out = []
    for method, by_c in result.rows.items():
        for c, rows in by_c.items():
            for row in rows:
                flat = {"method": method}
                flat.update({k: v for k, v in row.items() if k != "selector"})
                out.append(flat)
    return out


def write_rows_csv(rows: list[dict], fh) -> None:
    if not rows:
        return
    fields = list(dict.fromkeys(k for r in rows for k in r))
    w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if r.get(k) is None else (repr(r[k]) if isinstance(r[k], float) else r[k])) for k in fields})


def write_report_csv(result: StudyResult, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        write_rows_csv(flat_rows(result), fh)
