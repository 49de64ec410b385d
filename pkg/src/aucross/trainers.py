"""Pluggable probabilistic scorers.

A trainer maps ``(X, y)`` to a scorer; a scorer maps feature rows to
probabilities in ``[0, 1]``.  Three kinds ship:

* ``LogisticTrainer``: full-batch gradient descent on standardised features,
* ``PrecomputedScores``: a score vector looked up by row index,
* ``ExternalCommandTrainer``: any program speaking the CSV/stdout protocol.
"""
from __future__ import annotations

import csv
import os
import subprocess
import tempfile
from dataclasses import dataclass, field
from typing import Any, Optional, Protocol, Sequence

import numpy as np

from .errors import TrainerFailure, ValidationError


class Scorer(Protocol):
    def __call__(self, X: np.ndarray) -> np.ndarray: ...


class Trainer(Protocol):
    def fit(self, X: np.ndarray, y: np.ndarray, seed: int = 0) -> Scorer: ...


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500.0, 500.0)))


@dataclass
class LogisticScorer:
    mean: np.ndarray
    scale: np.ndarray
    weights: np.ndarray
    bias: float

    def __call__(self, X) -> np.ndarray:
        Z = (np.asarray(X, dtype=float) - self.mean) / self.scale
        return _sigmoid(Z @ self.weights + self.bias)

    def to_dict(self) -> dict:
        return {
            "kind": "builtin-logistic",
            "mean": self.mean.tolist(),
            "scale": self.scale.tolist(),
            "weights": self.weights.tolist(),
            "bias": self.bias,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LogisticScorer":
        return cls(
            np.asarray(d["mean"], dtype=float),
            np.asarray(d["scale"], dtype=float),
            np.asarray(d["weights"], dtype=float),
            float(d["bias"]),
        )


@dataclass
class LogisticTrainer:
    """L2-regularised logistic regression fitted by full-batch gradient descent.

    Deterministic: weights start at zero, so ``seed`` is accepted but unused.
    """

    learning_rate: float = 0.5
    iterations: int = 300
    l2: float = 0.0

    def fit(self, X, y, seed: int = 0) -> LogisticScorer:
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float)
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise ValidationError("X must be 2-D with one row per label")
        mean = X.mean(axis=0)
        scale = X.std(axis=0)
        scale[scale == 0] = 1.0
        Z = (X - mean) / scale
        n = Z.shape[0]
        w = np.zeros(Z.shape[1])
        b = 0.0
        for _ in range(self.iterations):
            err = _sigmoid(Z @ w + b) - y
            w -= self.learning_rate * (Z.T @ err / n + self.l2 * w)
            b -= self.learning_rate * err.mean()
        return LogisticScorer(mean, scale, w, float(b))


@dataclass
class PrecomputedScorer:
    scores: np.ndarray

    def __call__(self, X) -> np.ndarray:
        idx = np.asarray(X).reshape(len(X), -1)[:, 0].astype(np.int64)
        return self.scores[idx]


@dataclass
class PrecomputedScores:
    """Pass-through trainer over a fixed score vector.

    Rows of ``X`` are row indices into ``scores``; build them with
    :meth:`design_matrix`.
    """

    scores: np.ndarray

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=float)

    def design_matrix(self) -> np.ndarray:
        return np.arange(self.scores.size).reshape(-1, 1)

    def fit(self, X, y, seed: int = 0) -> PrecomputedScorer:
        return PrecomputedScorer(self.scores)


def write_feature_csv(path, X: np.ndarray, y: Optional[np.ndarray] = None) -> None:
    X = np.asarray(X, dtype=float)
    header = [f"f{j + 1}" for j in range(X.shape[1])]
    if y is not None:
        header.append("label")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i, row in enumerate(X):
            vals = [repr(float(v)) for v in row]
            if y is not None:
                vals.append(str(int(y[i])))
            w.writerow(vals)


@dataclass
class ExternalScorer:
    command: Sequence[str]
    X_train: np.ndarray
    y_train: np.ndarray
    timeout: Optional[float] = None

    def __call__(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        with tempfile.TemporaryDirectory(prefix="aucross-") as tmp:
            train_path = os.path.join(tmp, "train.csv")
            score_path = os.path.join(tmp, "score.csv")
            write_feature_csv(train_path, self.X_train, self.y_train)
            write_feature_csv(score_path, X)
            try:
                proc = subprocess.run(
                    [*self.command, train_path, score_path],
                    capture_output=True,
                    text=True,
                    timeout=self.timeout,
                    check=False,
                )
            except (OSError, subprocess.TimeoutExpired) as exc:
                raise TrainerFailure(f"external scorer failed to run: {exc}") from exc
        if proc.returncode != 0:
            raise TrainerFailure(
                f"external scorer exited with {proc.returncode}: {proc.stderr.strip()[:200]}"
            )
        lines = [ln for ln in proc.stdout.splitlines() if ln.strip()]
        try:
            out = np.array([float(ln) for ln in lines])
        except ValueError as exc:
            raise TrainerFailure(f"external scorer wrote a non-numeric line: {exc}") from exc
        if out.size != X.shape[0]:
            raise TrainerFailure(
                f"external scorer returned {out.size} scores for {X.shape[0]} rows"
            )
        return out


@dataclass
class ExternalCommandTrainer:
    """Delegate to ``command train.csv score.csv``; one probability per stdout line."""

    command: Sequence[str]
    timeout: Optional[float] = None

    def fit(self, X, y, seed: int = 0) -> ExternalScorer:
        return ExternalScorer(
            list(self.command),
            np.asarray(X, dtype=float),
            np.asarray(y, dtype=int),
            self.timeout,
        )


@dataclass
class TrainerSpec:
    kind: str = "builtin-logistic"
    hyperparameters: dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    def build(self) -> Trainer:
        hp = dict(self.hyperparameters)
        if self.kind == "builtin-logistic":
            return LogisticTrainer(**hp)
        if self.kind == "precomputed-scores":
            return PrecomputedScores(hp["scores"])
        if self.kind == "external-command":
            cmd = hp["command"]
            return ExternalCommandTrainer(
                cmd.split() if isinstance(cmd, str) else list(cmd), hp.get("timeout")
            )
        raise ValidationError(f"unknown trainer kind {self.kind!r}")


def as_trainer(trainer) -> Trainer:
    return trainer.build() if isinstance(trainer, TrainerSpec) else trainer


def score_checked(scorer: Scorer, X) -> np.ndarray:
    """Call ``scorer`` and enforce one probability per row; errors become TrainerFailure."""
    try:
        out = np.asarray(scorer(X), dtype=float).ravel()
    except TrainerFailure:
        raise
    except Exception as exc:
        raise TrainerFailure(f"scorer raised {type(exc).__name__}: {exc}") from exc
    if out.size != len(X):
        raise TrainerFailure(f"scorer returned {out.size} scores for {len(X)} rows")
    if not np.all(np.isfinite(out)) or out.min(initial=0.0) < 0 or out.max(initial=1.0) > 1:
        raise TrainerFailure("scorer produced values outside [0, 1]")
    return out
