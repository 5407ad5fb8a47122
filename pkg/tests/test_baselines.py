"""Reference selectors: fixed-stride and top-score sampling."""

import itertools

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from semlapse.baselines import naive_faces_sample, naive_sample
from semlapse.metrics import speedup_deviation


def sort_and_take_oracle(scores, k):
    order = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    return sorted(order[:k])


class TestNaiveSample:
    def test_every_tenth_frame(self):
        got = naive_sample(100, 10)
        assert got == list(range(0, 100, 10))
        assert len(got) == 10

    def test_rate_one_keeps_everything(self):
        assert naive_sample(7, 1) == [0, 1, 2, 3, 4, 5, 6]

    def test_short_video_keeps_first_frame(self):
        assert naive_sample(5, 10) == [0]

    def test_strictly_increasing_and_in_range(self):
        for n, F in ((1, 1), (2, 3), (99, 7), (1000, 13)):
            got = naive_sample(n, F)
            assert all(0 <= i < n for i in got)
            assert all(b > a for a, b in zip(got, got[1:]))

    def test_zero_deviation_when_rate_divides_count(self):
        for n, F in ((1000, 10), (96, 8), (70, 7)):
            sel = naive_sample(n, F)
            dev, pct = speedup_deviation(sel, n, F, 100)
            assert dev == 0.0
            assert pct == 100.0


class TestNaiveFacesSample:
    def test_equal_scores_take_first_block(self):
        got = naive_faces_sample(np.ones(20), 5)
        assert got == [0, 1, 2, 3]

    def test_decreasing_scores_take_prefix(self):
        scores = np.arange(30, 0, -1, dtype=float)
        assert naive_faces_sample(scores, 10) == [0, 1, 2]

    def test_ties_prefer_lower_index(self):
        scores = np.array([1.0, 3.0, 3.0, 1.0, 3.0, 0.0])
        # three-way tie at 3.0; k = 6 // 3 = 2 keeps the two earliest
        assert naive_faces_sample(scores, 3) == [1, 2]

    def test_tiny_video_yields_empty_selection(self):
        assert naive_faces_sample(np.array([5.0, 1.0]), 10) == []

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.floats(0, 100, allow_nan=False), min_size=1, max_size=40),
        st.integers(1, 12),
    )
    def test_matches_sort_and_take_oracle(self, scores, F):
        got = naive_faces_sample(np.array(scores), F)
        assert got == sort_and_take_oracle(scores, len(scores) // F)

    def test_maximizes_score_sum_over_all_same_size_selections(self):
        rng = np.random.default_rng(0)
        for n in (6, 9, 12, 15):
            scores = rng.uniform(0, 10, n)
            for F in (2, 3, 5):
                sel = naive_faces_sample(scores, F)
                k = n // F
                assert len(sel) == k
                got = scores[sel].sum()
                best = max(
                    scores[list(c)].sum()
                    for c in itertools.combinations(range(n), k)
                )
                assert got == best

    def test_zero_deviation_when_rate_divides_count(self):
        rng = np.random.default_rng(1)
        for n, F in ((100, 10), (48, 6)):
            sel = naive_faces_sample(rng.uniform(0, 1, n), F)
            dev, pct = speedup_deviation(sel, n, F, 100)
            assert dev == 0.0
            assert pct == 100.0
