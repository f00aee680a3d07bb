import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from identity_labeling.choice import (
    LabelDistribution,
    ScoredCandidates,
    argmax_label,
    binary_choice_prob,
    softmax_distribution,
)

scores = st.floats(-50, 50, allow_nan=False)


class TestSoftmax:
    def test_reference_values(self):
        # mpmath, 30 digits
        d = softmax_distribution(ScoredCandidates(["a", "b"], [1.0, 0.0]))
        np.testing.assert_allclose(d.prob, [0.7310585786300049, 0.2689414213699951], rtol=1e-15)
        d = softmax_distribution(ScoredCandidates(["a", "b"], [0.0, -2.0]))
        np.testing.assert_allclose(d.prob, [0.8807970779778824, 0.1192029220221176], rtol=1e-15)

    def test_shift_invariance(self, rng):
        phi = rng.normal(size=5)
        p1 = softmax_distribution(ScoredCandidates(list("abcde"), phi)).prob
        p2 = softmax_distribution(ScoredCandidates(list("abcde"), phi + 123.4)).prob
        np.testing.assert_allclose(p1, p2, rtol=1e-12)

    def test_large_scores_do_not_overflow(self):
        d = softmax_distribution(ScoredCandidates(["a", "b"], [1000.0, 0.0]))
        assert d["a"] == 1.0 and d["b"] == 0.0

    def test_single_candidate(self):
        assert softmax_distribution(ScoredCandidates(["x"], [-3.0]))["x"] == 1.0

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            ScoredCandidates([], [])
        with pytest.raises(ValueError):
            ScoredCandidates(["a"], [1.0, 2.0])
        with pytest.raises(ValueError):
            ScoredCandidates(["a"], [math.nan])
        with pytest.raises(ValueError):
            LabelDistribution(["a", "b"], [0.7, 0.7])


class TestBinary:
    @given(scores, scores)
    def test_matches_two_way_softmax(self, a, b):
        p = softmax_distribution(ScoredCandidates(["a", "b"], [a, b]))["a"]
        assert binary_choice_prob(a, b) == pytest.approx(p, abs=1e-12)

    @given(scores, scores)
    def test_complement(self, a, b):
        assert binary_choice_prob(a, b) + binary_choice_prob(b, a) == pytest.approx(1.0, abs=1e-15)

    def test_reference(self):
        assert binary_choice_prob(4, 0) == pytest.approx(0.9820137900379084, abs=1e-15)
        assert binary_choice_prob(0, 0) == 0.5

    def test_extremes(self):
        assert binary_choice_prob(0, 1e6) == 0.0
        assert binary_choice_prob(1e6, 0) == 1.0


class TestArgmax:
    def test_picks_highest(self):
        d = LabelDistribution(["a", "b", "c"], [0.2, 0.5, 0.3])
        assert argmax_label(d) == "b"

    def test_tie_goes_to_first(self):
        d = LabelDistribution(["x", "y"], [0.5, 0.5])
        assert argmax_label(d) == "x"
