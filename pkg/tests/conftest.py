import numpy as np
import pytest

from aucross.ranking import LabeledSample

SAMPLE1 = ([0.9, 0.8, 0.7, 0.6, 0.5, 0.4], [1, 1, 0, 1, 0, 0])
SAMPLE2 = ([0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1, 0.05], [1, 0, 1, 0, 1, 0, 1, 0, 0, 0])


@pytest.fixture
def sample1():
    return LabeledSample(*SAMPLE1)


@pytest.fixture
def sample2():
    return LabeledSample(*SAMPLE2)


def random_tie_free(rng, n_lo=5, n_hi=200, min_per_class=1):
    """Distinct scores on a grid, labels drawn with an informative logistic link."""
    while True:
        n = int(rng.integers(n_lo, n_hi + 1))
        z = rng.normal(size=n)
        strength = rng.uniform(-1.0, 3.0)
        y = (rng.random(n) < 1 / (1 + np.exp(-strength * z))).astype(int)
        if min(y.sum(), n - y.sum()) < min_per_class:
            continue
        scores = (np.argsort(np.argsort(z)) + 1) / (n + 1)
        return LabeledSample(scores, y)


def planted_tie_free(rng, n_lo=8, n_hi=150):
    """Informative ranking with a few positives pushed to the bottom.

    Such samples often give a non-empty abstention band from the bounds.
    """
    while True:
        n = int(rng.integers(n_lo, n_hi + 1))
        y = (rng.random(n) < rng.uniform(0.2, 0.6)).astype(int)
        z = rng.normal(size=n) + y * rng.uniform(1, 4)
        pos = np.flatnonzero(y)
        k = int(rng.integers(1, 4))
        if pos.size <= k or y.sum() == n:
            continue
        z[rng.choice(pos, k, replace=False)] -= rng.uniform(4, 8)
        scores = (np.argsort(np.argsort(z)) + 1) / (n + 1)
        return LabeledSample(scores, y)


# ---- acceptance reporting: one line per criterion in the terminal summary

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    num, title = mark.args
    prev = _CRITERIA.get(num, (title, True))
    _CRITERIA[num] = (title, prev[1] and rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        title, ok = _CRITERIA[num]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {num:>2}. {title}")
