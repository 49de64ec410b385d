"""Command-line front end.

Exit status: 0 on success, 2 for invalid input or options, 3 when the data
is degenerate (a single class where two are needed), 1 for anything else.
Every flag can also be set through an ``AUCROSS_<FLAG>`` environment
variable (``AUCROSS_COVERAGE=0.9``, ``AUCROSS_FOLDS=10``...); a flag given
on the command line wins.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import shlex
import sys
from typing import Optional, Sequence

import numpy as np

from .baselines import (
    oracle_search,
    plug_in,
    plug_in_auc,
    plug_in_auc_selector,
    plug_in_threshold,
    scross,
    scross_threshold,
)
from .crossfit import aucross_selector, fit_aucross
from .errors import AUCrossError, DegenerateSample, ParseError, ValidationError
from .evaluation import (
    C_GRID,
    METHODS,
    StudyConfig,
    bootstrap_evaluate,
    dumps,
    flat_rows,
    run_synthetic_study,
    write_rows_csv,
)
from .ranking import LabeledSample, cap_areas, cap_points, gini, mann_whitney_auc
from .selective import ConfidenceSelector, selective_report, selector_from_dict
from .thetas import estimate_thetas_auc
from .trainers import (
    ExternalCommandTrainer,
    LogisticScorer,
    LogisticTrainer,
    score_checked,
)

EXIT_OK, EXIT_FAILURE, EXIT_INVALID, EXIT_DEGENERATE = 0, 1, 2, 3


# ---------------------------------------------------------------- input files


def read_table(path: str) -> tuple[list[str], np.ndarray, np.ndarray]:
    """Parse a UTF-8 CSV whose last column is ``label``; return (feature names, values, labels)."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    if not rows:
        raise ParseError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    if len(header) < 2 or header[-1] != "label":
        raise ParseError(f"{path}: header must end with a 'label' column")
    body = [r for r in rows[1:] if r]
    if not body:
        raise ParseError(f"{path}: no data rows")
    values = np.empty((len(body), len(header) - 1))
    labels = np.empty(len(body), dtype=np.int64)
    for i, row in enumerate(body, start=2):
        if len(row) != len(header):
            raise ParseError(f"{path}:{i}: expected {len(header)} fields, got {len(row)}")
        lab = row[-1].strip()
        if lab not in ("0", "1"):
            raise ParseError(f"{path}:{i}: label must be 0 or 1, got {lab!r}")
        labels[i - 2] = int(lab)
        try:
            values[i - 2] = [float(v) for v in row[:-1]]
        except ValueError as exc:
            raise ParseError(f"{path}:{i}: {exc}") from exc
    return header[:-1], values, labels


def read_scores(path: str) -> LabeledSample:
    names, values, labels = read_table(path)
    if names != ["score"]:
        raise ParseError(f"{path}: expected header 'score,label'")
    return LabeledSample(values[:, 0], labels)


def read_features(path: str) -> tuple[np.ndarray, np.ndarray]:
    names, values, labels = read_table(path)
    if names == ["score"]:
        raise ParseError(f"{path}: expected feature columns f1..fd, found a score file")
    return values, labels


# ------------------------------------------------------------------- output


def _flatten(d: dict, prefix: str = "") -> dict:
    out = {}
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, key + "."))
        elif not isinstance(v, (list, tuple)):
            out[key] = v
    return out


def emit(payload, args, rows: Optional[list[dict]] = None) -> None:
    if args.format == "csv":
        buf = io.StringIO()
        write_rows_csv(rows if rows is not None else [_flatten(payload)], buf)
        text = buf.getvalue()
    else:
        text = dumps(payload) + "\n"
    if args.output and args.output != "-":
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ----------------------------------------------------------------- commands


def _trainer(args):
    spec = args.trainer or "logistic"
    if spec == "logistic":
        return LogisticTrainer()
    if spec.startswith("external:"):
        return ExternalCommandTrainer(shlex.split(spec[len("external:"):]))
    raise ValidationError(f"unknown trainer {spec!r}; use 'logistic' or 'external:<command>'")


def _single_coverage(args) -> float:
    cs = args.coverage or [0.9]
    if len(cs) != 1:
        raise ValidationError("this command takes a single --coverage")
    return cs[0]


def cmd_metrics(args):
    s = read_scores(args.input)
    areas = cap_areas(s)
    emit(
        {
            "n": s.n,
            "n_pos": s.n_pos,
            "auc": mann_whitney_auc(s),
            "auc_strict": mann_whitney_auc(s, strict=True),
            "gini": gini(s),
            "cap_areas": {"A": areas.A, "B": areas.B},
            "cap_points": cap_points(s).tolist(),
        },
        args,
    )


def cmd_thetas(args):
    emit(estimate_thetas_auc(read_scores(args.input)).to_dict(), args)


def _selector_from_scores(method: str, s: LabeledSample, c: float, seed: int):
    """Selectors from precomputed (out-of-fold or validation) scores."""
    if method == "aucross":
        return aucross_selector(s, c, seed=seed)
    if method == "pluginauc":
        return plug_in_auc_selector(s, c)
    if method == "plugin":
        theta = plug_in_threshold(s.scores, c)
        return ConfidenceSelector(theta), {"theta": theta}
    if method == "scross":
        theta, diag = scross_threshold(s.scores, c, seed)
        return ConfidenceSelector(theta), diag
    raise ValidationError(f"unknown method {method!r}")


def cmd_fit(args, allowed=METHODS):
    method = args.method
    if method is None:
        raise ValidationError(f"--method is required (one of {', '.join(allowed)})")
    if method not in allowed:
        raise ValidationError(f"--method must be one of {', '.join(allowed)}")
    c = _single_coverage(args)
    if args.scores_file:
        sel, diag = _selector_from_scores(method, read_scores(args.scores_file), c, args.seed)
        diag.update(method=method, c=c, seed=args.seed, trainer="precomputed-scores")
        emit({"selector": sel.to_dict(), "diagnostics": diag}, args)
        return
    if not args.input:
        raise ValidationError("give a feature CSV or --scores-file")
    X, y = read_features(args.input)
    trainer = _trainer(args)
    if method == "aucross":
        clf = fit_aucross(X, y, trainer, c, K=args.folds, seed=args.seed)
    elif method == "scross":
        clf = scross(X, y, trainer, c, K=args.folds, seed=args.seed)
    elif method == "plugin":
        clf = plug_in(X, y, trainer, c, seed=args.seed)
    else:
        clf = plug_in_auc(X, y, trainer, c, seed=args.seed)
    emit(clf.to_dict(), args)


def cmd_baseline(args):
    cmd_fit(args, allowed=("plugin", "pluginauc", "scross"))


def cmd_oracle(args):
    res = oracle_search(read_scores(args.input), _single_coverage(args))
    emit(res.to_dict(), args)


def _load_model(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            d = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot load selector from {path}: {exc}") from exc
    scorer = None
    if d.get("scorer", {}).get("kind") == "builtin-logistic":
        scorer = LogisticScorer.from_dict(d["scorer"])
    return selector_from_dict(d["selector"]), scorer


def _test_sample(path: str, scorer) -> LabeledSample:
    names, values, labels = read_table(path)
    if names == ["score"]:
        return LabeledSample(values[:, 0], labels)
    if scorer is None:
        raise ValidationError("feature input needs a selector file that stores a scorer")
    return LabeledSample(score_checked(scorer, values), labels)


def cmd_evaluate(args):
    grid = args.coverage or list(C_GRID)
    rows = []
    if args.selector:
        sel, scorer = _load_model(args.selector)
        test = _test_sample(args.input, scorer)
        selectors = {c: sel for c in grid}
    else:
        if not args.scores_file:
            raise ValidationError("evaluate needs --selector or --scores-file with calibration scores")
        calib = read_scores(args.scores_file)
        method = args.method or "aucross"
        selectors = {c: _selector_from_scores(method, calib, c, args.seed)[0] for c in grid}
        test = read_scores(args.input)
    for c in grid:
        sel = selectors[c]
        point = selective_report(test, sel, c)
        boot = bootstrap_evaluate(test, sel, c, B=args.bootstrap, seed=args.seed)
        rows.append({**boot.to_dict(), "coverage": point.coverage,
                     "selective_auc": point.selective_auc, "selector": sel.to_dict()})
    emit({"rows": rows}, args, rows=[{k: v for k, v in r.items() if k != "selector"} for r in rows])


def cmd_bench(args):
    config = StudyConfig(
        seeds=tuple(args.seeds) if args.seeds else (args.seed,),
        c_grid=tuple(args.coverage or C_GRID),
        n_train=args.n_train,
        n_test=args.n_test,
        methods=tuple(args.bench_methods or METHODS),
        K=args.folds,
        B=args.bootstrap,
    )
    result = run_synthetic_study(config)
    emit(result.to_dict(), args, rows=flat_rows(result))


COMMANDS = {
    "metrics": cmd_metrics,
    "thetas": cmd_thetas,
    "fit": cmd_fit,
    "baseline": cmd_baseline,
    "oracle": cmd_oracle,
    "evaluate": cmd_evaluate,
    "bench": cmd_bench,
}


# ------------------------------------------------------------------- parser


def _env(name: str, default=None, cast=str):
    raw = os.environ.get(f"AUCROSS_{name}")
    if raw is None:
        return default
    try:
        return cast(raw)
    except ValueError:
        raise ValidationError(f"AUCROSS_{name}={raw!r} is not a valid value")


def _env_list(name: str, cast=float):
    raw = os.environ.get(f"AUCROSS_{name}")
    if raw is None:
        return None
    try:
        return [cast(v) for v in raw.replace(",", " ").split()]
    except ValueError:
        raise ValidationError(f"AUCROSS_{name}={raw!r} is not a valid list")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--coverage", type=float, action="append",
                        help="target coverage in (0, 1]; repeat for a grid")
    common.add_argument("--folds", type=int, default=_env("FOLDS", 5, int))
    common.add_argument("--seed", type=int, default=_env("SEED", 0, int))
    common.add_argument("--method", default=_env("METHOD"))
    common.add_argument("--trainer", default=_env("TRAINER"),
                        help="'logistic' (default) or 'external:<command>'")
    common.add_argument("--scores-file", default=_env("SCORES_FILE"),
                        help="CSV 'score,label' of precomputed scores")
    common.add_argument("--bootstrap", type=int, default=_env("BOOTSTRAP", 1000, int))
    common.add_argument("--output", default=_env("OUTPUT"), help="output path (default stdout)")
    common.add_argument("--format", choices=("json", "csv"), default=_env("FORMAT", "json"))

    p = argparse.ArgumentParser(prog="aucross", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("metrics", "thetas", "oracle"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("input", help="CSV 'score,label'")
    for name in ("fit", "baseline"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("input", nargs="?", help="CSV 'f1..fd,label'")
    sp = sub.add_parser("evaluate", parents=[common])
    sp.add_argument("input", help="test CSV, scores or features")
    sp.add_argument("--selector", help="JSON written by fit/baseline")
    sp = sub.add_parser("bench", parents=[common])
    sp.add_argument("--seeds", type=int, nargs="+")
    sp.add_argument("--n-train", type=int, default=5000)
    sp.add_argument("--n-test", type=int, default=2000)
    sp.add_argument("--methods", dest="bench_methods", nargs="+", choices=METHODS)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        if args.coverage is None:
            args.coverage = _env_list("COVERAGE")
        COMMANDS[args.command](args)
    except DegenerateSample as exc:
        print(f"aucross: degenerate data: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ValidationError as exc:
        print(f"aucross: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except AUCrossError as exc:
        print(f"aucross: failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except SystemExit as exc:  # argparse
        return int(exc.code or 0)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
