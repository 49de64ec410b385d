from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from aucross.errors import Underflow, ValidationError, WrongClass
from aucross.ranking import LabeledSample, RankProfile, auc_fraction, cap_areas
from aucross.selective import (
    EMPTY_BAND,
    ConfidenceSelector,
    ScoreBandSelector,
    apply_selector,
    area_after_remove_negative,
    area_after_remove_positive,
    removable_negative,
    removable_positive,
    selective_report,
    selector_from_dict,
)

from .oracles import brute_auc_loops


def test_apply_selector_examples(sample2):
    acc, cov = apply_selector(sample2, ScoreBandSelector(0.35, 0.55))
    assert cov == 0.8
    assert sorted(set(sample2.scores) - set(acc.scores)) == [0.4, 0.5]
    assert apply_selector(sample2, EMPTY_BAND)[1] == 1.0
    acc, cov = apply_selector(sample2, ScoreBandSelector(0.0, 1.0))
    assert cov == 0.0 and acc.n == 0


def test_inclusive_and_half_open_edges():
    s = [0.2, 0.4, 0.6]
    np.testing.assert_array_equal(ScoreBandSelector(0.2, 0.4).rejects(s), [True, True, False])
    np.testing.assert_array_equal(
        ScoreBandSelector(0.2, 0.4, "half-open").rejects(s), [True, False, False]
    )
    with pytest.raises(ValidationError):
        ScoreBandSelector(0.1, 0.2, "open")


def test_selector_roundtrip():
    for sel in (ScoreBandSelector(0.1, 0.3), ConfidenceSelector(0.7), EMPTY_BAND):
        assert selector_from_dict(sel.to_dict()) == sel


def test_selective_report_examples(sample2):
    accepted = [0.9, 0.8, 0.7, 0.6, 0.3, 0.2, 0.1, 0.05]
    labels = [1, 0, 1, 0, 1, 0, 0, 0]
    assert brute_auc_loops(accepted, labels) == Fraction(12, 15)
    rep = selective_report(sample2, ScoreBandSelector(0.35, 0.55), 0.8)
    assert rep.coverage == 0.8 and rep.violation == 0.0
    assert rep.selective_auc == pytest.approx(0.8, abs=1e-15)
    assert (rep.m, rep.m_pos, rep.m_neg) == (8, 3, 5)
    assert rep.positive_rate == 3 / 8
    assert rep.selective_accuracy + rep.selective_risk == 1.0

    full = selective_report(sample2, EMPTY_BAND, 1.0)
    assert full.coverage == 1.0 and full.selective_auc == 0.75 and full.violation == 0.0

    none = selective_report(sample2, ScoreBandSelector(0.0, 1.0), 0.8)
    assert none.coverage == 0.0 and none.selective_auc is None
    assert none.violation == pytest.approx(0.8)
    assert none.selective_accuracy is None


def test_selective_accuracy_threshold(sample2):
    # predictions: score > .5 -> 1
    rep = selective_report(sample2, EMPTY_BAND, 1.0)
    assert rep.selective_accuracy == pytest.approx(0.6)
    rep = selective_report(sample2, EMPTY_BAND, 1.0, threshold=0.25)
    assert rep.selective_accuracy == pytest.approx(0.7)


def test_removable_positive_examples(sample2):
    prof = RankProfile(sample2)
    auc = auc_fraction(sample2)
    assert removable_positive(sample2, prof, 6, auc)  # score .3
    assert not removable_positive(sample2, prof, 4, auc)  # score .5
    with pytest.raises(WrongClass):
        removable_positive(sample2, prof, 1, auc)
    perfect = LabeledSample([0.9, 0.8, 0.3, 0.2, 0.1], [1, 1, 0, 0, 0])
    pp = RankProfile(perfect)
    assert not removable_positive(perfect, pp, 1, auc_fraction(perfect))


def test_removable_negative_examples(sample2):
    prof = RankProfile(sample2)
    auc = auc_fraction(sample2)
    assert removable_negative(sample2, prof, 3, auc)  # score .6, 0.5 <= 0.5
    assert not removable_negative(sample2, prof, 5, auc)  # score .4
    with pytest.raises(WrongClass):
        removable_negative(sample2, prof, 0, auc)
    one_pos = LabeledSample([0.9, 0.7, 0.5, 0.3], [0, 1, 0, 0])
    op = RankProfile(one_pos)
    assert not any(removable_negative(one_pos, op, i, auc_fraction(one_pos)) for i in (0, 2, 3))


def test_area_after_remove_positive_three_instances():
    # positives at .9 and .5, negative at .7; drop the lower positive
    s = LabeledSample([0.9, 0.7, 0.5], [1, 0, 1])
    prof = RankProfile(s)
    got = area_after_remove_positive(cap_areas(s), s.n, s.n_pos, prof.r_prime(2), prof.t(2))
    assert got == pytest.approx(cap_areas(s.take([0, 1])).A, abs=1e-12)
    with pytest.raises(Underflow):
        area_after_remove_positive(cap_areas(LabeledSample([0.9, 0.1], [1, 0])), 2, 1, 2, 1)


def test_area_after_remove_negative_shrinks():
    # perfect ranking with the top negative at t = n_pos
    s = LabeledSample([0.9, 0.8, 0.4, 0.2], [1, 1, 0, 0])
    prof = RankProfile(s)
    before = cap_areas(s)
    after = area_after_remove_negative(before, s.n, s.n_pos, prof.t(2))
    assert after < before.A
    assert after == pytest.approx(cap_areas(s.take([0, 1, 3])).A, abs=1e-12)
    with pytest.raises(Underflow):
        area_after_remove_negative(cap_areas(LabeledSample([0.9, 0.1], [1, 0])), 2, 1, 1)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(st.tuples(st.floats(0, 1), st.integers(0, 1)), min_size=1, max_size=40)
)
def test_empty_band_is_identity(rows):
    s = LabeledSample([r[0] for r in rows], [r[1] for r in rows])
    acc, cov = apply_selector(s, EMPTY_BAND)
    assert cov == 1.0
    np.testing.assert_array_equal(acc.scores, s.scores)
    np.testing.assert_array_equal(acc.labels, s.labels)


def test_confidence_selector():
    sel = ConfidenceSelector(0.6)
    np.testing.assert_array_equal(sel.accepts([0.35, 0.4, 0.65, 0.9]), [True, False, True, True])
    assert ConfidenceSelector(-np.inf).accepts([0.5]).all()
