from dataclasses import dataclass

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pathexp.coexplosive import (
    BORDERLINE,
    CO_EXPLOSIVE,
    NOT_CO_EXPLOSIVE,
    classify_pair,
    concordance,
    jaccard,
    match_episodes,
    sign_concordance,
)
from pathexp.windows import EpisodeWindow


@dataclass(frozen=True)
class Ep:
    window: EpisodeWindow
    score: float


def ep(a, b, score=0.5):
    return Ep(EpisodeWindow(0, b - a, a, b, 1.0), score)


def test_overlapping_pair_gives_j_one():
    rep = classify_pair([ep(1964, 1971, 0.702)], [ep(1965, 1972, 0.095)], "a", "b")
    assert len(rep.cooccurring_pairs) == 1
    assert rep.jaccard == 1.0
    assert (rep.spearman, rep.kendall, rep.sign_concordance) == (None, None, None)
    assert rep.classification == BORDERLINE


def test_disjoint_halves_give_zero():
    rep = classify_pair([ep(0, 14), ep(20, 34)], [ep(40, 54), ep(60, 74)])
    assert rep.cooccurring_pairs == []
    assert rep.jaccard == 0.0
    assert rep.classification == NOT_CO_EXPLOSIVE


def test_identical_singletons():
    e = [ep(10, 20)]
    assert classify_pair(e, e).jaccard == 1.0


def test_empty_side_is_not_co_explosive():
    assert classify_pair([ep(0, 10)], []).classification == NOT_CO_EXPLOSIVE
    assert classify_pair([], []).jaccard == 0.0


def test_jaccard_formula():
    assert jaccard(2, 2, 2) == 1.0
    assert jaccard(2, 1, 1) == 0.5
    assert jaccard(0, 0, 0) == 0.0


def test_concordance_two_rising_pairs():
    c = concordance([0.4, 0.8], [0.3, 0.9])
    assert c.spearman == pytest.approx(1.0)
    assert c.sign_concordance == 1.0


def test_concordance_reversed():
    c = concordance([0.2, 0.5, 0.9], [0.9, 0.5, 0.2])
    assert c.spearman == pytest.approx(-1.0)
    assert c.kendall == pytest.approx(-1.0)
    assert c.sign_concordance == 0.0


def test_concordance_single_pair_undefined():
    c = concordance([0.4], [0.3])
    assert (c.spearman, c.kendall, c.sign_concordance) == (None, None, None)
    assert not c.determined


def test_sign_concordance_ties_agree():
    assert sign_concordance([0.5, 0.5], [0.3, 0.3]) == 1.0
    assert sign_concordance([0.5, 0.5], [0.3, 0.4]) == 0.0


def test_classification_rules():
    a = [ep(0, 10, 0.3), ep(20, 30, 0.6)]
    b = [ep(1, 11, 0.2), ep(21, 31, 0.9)]
    assert classify_pair(a, b).classification == CO_EXPLOSIVE
    b_rev = [ep(1, 11, 0.9), ep(21, 31, 0.2)]
    assert classify_pair(a, b_rev).classification == NOT_CO_EXPLOSIVE
    # J = 2/3 < 0.67 despite perfect concordance
    c = [ep(1, 11, 0.2), ep(21, 31, 0.9), ep(50, 60, 0.1)]
    rep = classify_pair(a, c)
    assert rep.jaccard == pytest.approx(2 / 3)
    assert rep.classification == NOT_CO_EXPLOSIVE


def test_equal_scores_fall_back_on_sign_concordance():
    a = [ep(0, 10, 0.5), ep(20, 30, 0.5)]
    rep = classify_pair(a, a)
    assert rep.spearman is None
    assert rep.sign_concordance == 1.0
    assert rep.classification == CO_EXPLOSIVE


def test_matching_is_one_to_one_by_overlap():
    w1 = [ep(0, 10)]
    w2 = [ep(8, 20), ep(2, 12)]
    assert match_episodes(w1, w2) == [(0, 1)]
    # an overlap fraction floor can remove weak matches
    assert match_episodes([ep(0, 10)], [ep(10, 20)], min_overlap_frac=0.5) == []


def test_pairs_in_time_order():
    w1 = [ep(30, 40), ep(0, 10)]
    w2 = [ep(1, 11), ep(31, 41)]
    assert match_episodes(w1, w2) == [(1, 0), (0, 1)]


def test_report_dict():
    d = classify_pair([ep(0, 10, 0.4)], [ep(2, 12, 0.6)], "a", "b").to_dict()
    assert d["series_1"] == "a" and d["classification"] == BORDERLINE
    assert d["cooccurring_pairs"][0][1]["score"] == 0.6


def _disjoint(parts):
    # gaps and widths laid end to end, as the detector never overlaps windows
    out, t = [], 0
    for gap, width, s in parts:
        t += gap
        out.append(ep(t, t + width, s))
        t += width + 1
    return out


episodes = st.lists(
    st.tuples(st.integers(0, 12), st.integers(4, 15), st.floats(0, 1)), max_size=4
).map(_disjoint)


@settings(max_examples=300, deadline=None)
@given(episodes, episodes)
def test_symmetry_and_ranges(e1, e2):
    r12 = classify_pair(e1, e2)
    r21 = classify_pair(e2, e1)
    assert 0.0 <= r12.jaccard <= 1.0
    assert r12.jaccard == r21.jaccard
    assert len(r12.cooccurring_pairs) == len(r21.cooccurring_pairs)
    assert r12.sign_concordance == r21.sign_concordance
    assert r12.classification == r21.classification
    if len(r12.cooccurring_pairs) < 2:
        assert r12.classification != CO_EXPLOSIVE
    if r12.jaccard == 1.0:
        assert len(r12.cooccurring_pairs) == len(e1) == len(e2)
