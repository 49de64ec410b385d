"""Acceptance suite: one test per criterion, summarized as PASS/FAIL lines.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary lists every
criterion with its outcome.
"""
import json
import math
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aucross.baselines import oracle_search, plug_in_auc_selector
from aucross.crossfit import (
    aucross_selector,
    cross_fit_scores,
    make_fold_plan,
    two_way_split,
)
from aucross.errors import DegenerateSample
from aucross.evaluation import (
    C_GRID,
    StudyConfig,
    SyntheticSpec,
    bootstrap_evaluate,
    generate_synthetic,
    run_synthetic_study,
)
from aucross.ranking import (
    LabeledSample,
    RankProfile,
    auc_fraction,
    cap_areas,
    gini,
    mann_whitney_auc,
)
from aucross.selective import (
    ScoreBandSelector,
    apply_selector,
    area_after_remove_negative,
    area_after_remove_positive,
    removable_negative,
    removable_positive,
    selective_report,
)
from aucross.thetas import (
    KNIGHT_WEIGHT,
    combine_estimates,
    estimate_thetas_auc,
    theta_l_from_positive_quantile,
)
from aucross.trainers import LogisticTrainer

from .conftest import SAMPLE1, SAMPLE2, planted_tie_free, random_tie_free
from .oracles import brute_auc, brute_auc_loops, brute_cap_area_above_diagonal, brute_oracle

criterion = pytest.mark.criterion


def corpus(seed, count, **kw):
    rng = np.random.default_rng(seed)
    return [random_tie_free(rng, **kw) for _ in range(count)]


@pytest.fixture(scope="module")
def corpus500():
    return corpus(20260101, 500)


@criterion(1, "fast AUC equals O(n^2) pair counting on 500 tie-free samples")
def test_auc_oracle_equivalence(corpus500):
    start = time.perf_counter()
    for s in corpus500:
        fast = mann_whitney_auc(s)
        ref = brute_auc(s.scores, s.labels)
        assert abs(fast - float(ref)) <= 1e-12
        assert auc_fraction(s) == ref
    assert time.perf_counter() - start < 5.0


@criterion(2, "Gini and CAP-area identities")
def test_identities(corpus500):
    for s in corpus500:
        auc = mann_whitney_auc(s)
        g = gini(s)
        areas = cap_areas(s)
        assert abs(g - (2 * auc - 1)) <= 1e-12
        assert abs(g - areas.A / (areas.A + areas.B)) <= 1e-12
        assert abs(areas.A + areas.B - s.p_neg / 2) <= 1e-12
        ref_a = brute_cap_area_above_diagonal(list(s.scores), list(map(int, s.labels)))
        assert abs(areas.A - float(ref_a)) <= 1e-12


def _strict_auc(s):
    return brute_auc(s.scores, s.labels, strict=True)


def _check_removals(s, cls, flagged_fn):
    """Every flagged single removal and the joint removal raise the strict AUC."""
    base = _strict_auc(s)
    prof = RankProfile(s)
    auc = auc_fraction(s, strict=True)
    idx = np.flatnonzero(s.labels == cls)
    flagged = [int(i) for i in idx if flagged_fn(s, prof, int(i), auc)]
    for i in flagged:
        rest = s.take(np.delete(np.arange(s.n), i))
        assert _strict_auc(rest) > base
    if flagged:
        rest = s.take(np.setdiff1d(np.arange(s.n), flagged))
        assert rest.n_pos > 0 and rest.n_neg > 0
        assert _strict_auc(rest) > base
    return len(flagged)


@criterion(3, "dropping flagged positives or negatives strictly raises strict AUC")
def test_prop_monotonicity():
    flagged_pos = flagged_neg = 0
    for s in corpus(3001, 1000, n_hi=120):
        flagged_pos += _check_removals(s, 1, removable_positive)
    for s in corpus(3002, 1000, n_hi=120):
        flagged_neg += _check_removals(s, 0, removable_negative)
    # the suites must actually exercise removals
    assert flagged_pos > 1000 and flagged_neg > 1000


@criterion(4, "incremental CAP-area updates match recomputation")
def test_area_updates():
    rng = np.random.default_rng(4004)
    done = {1: 0, 0: 0}
    while min(done.values()) < 1000:
        s = random_tie_free(rng, min_per_class=2)
        prof = RankProfile(s)
        areas = cap_areas(s)
        for cls in (1, 0):
            if done[cls] >= 1000:
                continue
            x = int(rng.choice(np.flatnonzero(s.labels == cls)))
            t = int(prof.t(x))
            if cls == 1:
                got = area_after_remove_positive(areas, s.n, s.n_pos, int(prof.r_prime(x)), t)
            else:
                got = area_after_remove_negative(areas, s.n, s.n_pos, t)
            rest = s.take(np.delete(np.arange(s.n), x))
            assert abs(got - cap_areas(rest).A) <= 1e-9
            done[cls] += 1


@criterion(5, "bounds from estimate_thetas_auc never lower AUC; characterizations agree")
def test_prop3_suite():
    rng = np.random.default_rng(5005)
    nonempty = 0
    for k in range(1000):
        s = planted_tie_free(rng) if k % 2 else random_tie_free(rng)
        th = estimate_thetas_auc(s)
        assert theta_l_from_positive_quantile(s) == th.theta_l
        prof = RankProfile(s)
        auc = auc_fraction(s)
        rp = prof.r_prime()
        below_u = s.scores <= th.theta_u
        assert np.all(rp[below_u] <= th.u_index)
        for i in np.flatnonzero(s.labels == 0):
            assert removable_negative(s, prof, int(i), auc) == bool(s.scores[i] >= th.theta_l)
        sel = ScoreBandSelector(th.theta_l, th.theta_u)
        band = sel.rejects(s.scores)
        for i in np.flatnonzero(band):
            i = int(i)
            if s.labels[i] == 1:
                assert removable_positive(s, prof, i, auc)
            else:
                assert removable_negative(s, prof, i, auc)
        acc, _ = apply_selector(s, sel)
        base = _strict_auc(s)
        if band.any():
            nonempty += 1
            assert acc.n_pos > 0 and acc.n_neg > 0
            assert _strict_auc(acc) > base
        else:
            assert _strict_auc(acc) == base
    assert nonempty >= 50


def brute_thetas(scores, labels):
    """Bounds straight from the removal conditions, with pair-counted AUC."""
    auc = brute_auc_loops(scores, labels)
    n = len(scores)
    p = sum(labels)
    q = n - p
    asc = sorted(scores)
    u = max(k for k in range(n + 1) if k <= auc * q)
    theta_u = asc[u - 1] if u else 0.0
    ok = [x for x in scores
          if Fraction(sum(1 for s, y in zip(scores, labels) if y == 1 and s > x), p)
          <= auc - Fraction(1, p)]
    theta_l = min(ok) if ok else 1.0
    return theta_l, theta_u


@criterion(6, "hand traces re-derived by brute force")
def test_hand_traces():
    for data, expected in ((SAMPLE1, (0.8, 0.5)), (SAMPLE2, (0.5, 0.3))):
        assert brute_thetas(*data) == expected
        th = estimate_thetas_auc(LabeledSample(*data))
        assert (th.theta_l, th.theta_u) == expected
    auc, cov, band = brute_oracle(*SAMPLE2, 0.8)
    assert (auc, cov, band) == (Fraction(17, 20), 0.9, (0.8, 0.8))
    res = oracle_search(LabeledSample(*SAMPLE2), 0.8)
    assert res.best_auc_exact == auc and res.achieved_coverage == cov
    assert res.best_auc == 0.85


def _halves_two_class(s, seed):
    return all(0 < s.labels[h].sum() < h.size for h in two_way_split(s.n, seed))


@criterion(7, "oracle incremental equals naive; oracle dominates AUCross and PlugInAUC")
def test_oracle_modes_and_dominance():
    rng = np.random.default_rng(7007)
    done = 0
    while done < 200:
        s = random_tie_free(rng, n_lo=8, n_hi=60, min_per_class=3)
        c = float(rng.choice(C_GRID + (0.6, 0.5)))
        seed = int(rng.integers(0, 2**31))
        if not _halves_two_class(s, seed):
            continue
        inc = oracle_search(s, c)
        naive = oracle_search(s, c, mode="naive")
        assert inc.best_auc_exact == naive.best_auc_exact
        assert inc.best_selector == naive.best_selector
        assert inc.achieved_coverage == naive.achieved_coverage >= c
        for sel in (aucross_selector(s, c, seed=seed)[0], plug_in_auc_selector(s, c)[0]):
            acc, cov = apply_selector(s, sel)
            if cov >= c and acc.n_pos and acc.n_neg:
                assert inc.best_auc_exact >= auc_fraction(acc)
            assert cov >= c
        done += 1


@pytest.fixture(scope="module")
def study():
    start = time.perf_counter()
    result = run_synthetic_study(StudyConfig())
    return result, time.perf_counter() - start


@criterion(8, "synthetic two-Gaussian study: coverage, monotone AUC, oracle gap, runtime")
def test_synthetic_study(study):
    result, elapsed = study
    cfg = result.config
    assert tuple(cfg.seeds) == (1, 2, 3, 4, 5) and tuple(cfg.c_grid) == C_GRID
    assert (cfg.n_train, cfg.n_test, cfg.B) == (5000, 2000, 1000)
    for seed_pos, seed in enumerate(cfg.seeds):
        prev = None
        for c in cfg.c_grid:  # descending
            row = result.cell("aucross", c)[seed_pos]
            assert row["seed"] == seed
            assert row["violation"] <= 0.05
            if prev is not None:
                assert row["selective_auc_mean"] >= prev["selective_auc_mean"] - row["selective_auc_std"]
            if c >= 0.85:
                assert row["oracle_gap"] <= 0.02
            prev = row
    assert elapsed < 120.0


def _cli(args, cwd):
    proc = subprocess.run([sys.executable, "-m", "aucross", *args], cwd=cwd,
                          capture_output=True, check=False)
    assert proc.returncode == 0, proc.stderr
    return proc.stdout


@criterion(9, "bit-identical outputs across runs and across serial/parallel execution")
def test_determinism(tmp_path):
    s2 = tmp_path / "s2.csv"
    s2.write_text("score,label\n" + "".join(f"{a!r},{b}\n" for a, b in zip(*SAMPLE2)))
    d = generate_synthetic(SyntheticSpec(400, seed=9))
    feat = tmp_path / "f.csv"
    feat.write_text("f1,f2,label\n" + "".join(
        f"{float(x[0])!r},{float(x[1])!r},{y}\n" for x, y in zip(d.X, d.y)))
    model = tmp_path / "m.json"
    model.write_bytes(_cli(["fit", str(feat), "--method", "aucross", "--coverage", "0.9",
                            "--seed", "3"], tmp_path))
    commands = [
        ["metrics", str(s2)],
        ["thetas", str(s2)],
        ["oracle", str(s2), "--coverage", "0.8"],
        ["fit", str(feat), "--method", "aucross", "--coverage", "0.9", "--seed", "3"],
        ["fit", "--method", "aucross", "--scores-file", str(s2), "--coverage", "0.8"],
        ["baseline", str(feat), "--method", "scross", "--coverage", "0.9", "--seed", "3"],
        ["baseline", str(feat), "--method", "pluginauc", "--coverage", "0.9", "--seed", "3"],
        ["evaluate", str(feat), "--selector", str(model), "--bootstrap", "100", "--seed", "3"],
        ["bench", "--seeds", "1", "--n-train", "400", "--n-test", "200", "--bootstrap", "30",
         "--coverage", "0.9", "--coverage", "0.8", "--format", "csv"],
    ]
    for cmd in commands:
        assert _cli(cmd, tmp_path) == _cli(cmd, tmp_path), cmd

    big = generate_synthetic(SyntheticSpec(1500, seed=10))
    plan = make_fold_plan(big.y, 5, 10)
    a = cross_fit_scores(big.X, big.y, LogisticTrainer(), plan, seed=10, n_jobs=1)
    b = cross_fit_scores(big.X, big.y, LogisticTrainer(), plan, seed=10, n_jobs=4)
    assert a.scores.tobytes() == b.scores.tobytes()
    sel, diag = aucross_selector(a, 0.8, seed=10)
    sel_b, diag_b = aucross_selector(b, 0.8, seed=10)
    assert sel == sel_b and json.dumps(diag) == json.dumps(diag_b)
    assert bootstrap_evaluate(a, sel, 0.8, B=200, seed=1) == bootstrap_evaluate(
        a, sel, 0.8, B=200, seed=1, n_jobs=4)
    assert oracle_search(a, 0.8) == oracle_search(a, 0.8, n_jobs=4)


@criterion(10, "quantile combination: exact fixed points, weights sum to one")
@settings(max_examples=500, deadline=None)
@given(st.floats(0, 1), st.floats(0, 0.5))
def test_combination_exactness(v, spread):
    assert combine_estimates(v, [v, v]) == v
    lo, hi = v - spread, v + spread
    if (Fraction(lo) + Fraction(hi)) / 2 == Fraction(v):
        assert combine_estimates(v, [lo, hi]) == v
    assert KNIGHT_WEIGHT + (1 - KNIGHT_WEIGHT) == 1.0
    w = Fraction(KNIGHT_WEIGHT)
    assert w + (1 - w) == 1
