"""Domain primitives against the naive oracles: every vectorized quantity in
core must agree bit-for-bit with a per-point Python loop.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boostgap.core import (
    ExplicitHypothesis,
    RandomHypothesis,
    SampleDistribution,
    SampleSet,
    TailMinusHypothesis,
    Universe,
    VotingClassifier,
    advantage,
    draw_sample,
    exact_error,
    margin,
)
from boostgap import bitgen

from oracles import naive_advantage, naive_draws, naive_error_count, naive_margin


def _random_classifier(u: int, n_terms: int, seed: int) -> tuple[VotingClassifier, np.ndarray]:
    rng = np.random.default_rng(seed)
    rows = rng.choice(np.array([-1, 1], dtype=np.int8), size=(n_terms, u))
    raw = rng.random(n_terms) + 0.05
    weights = raw / raw.sum()
    terms = tuple(
        (float(w), ExplicitHypothesis(row, label=("t", i)))
        for i, (w, row) in enumerate(zip(weights, rows))
    )
    return VotingClassifier(terms), rows


class TestUniverseAndHypotheses:
    def test_universe_rejects_nonpositive(self):
        with pytest.raises(ValueError, match="universe size"):
            Universe(0)

    def test_tail_minus_boundary(self):
        h = TailMinusHypothesis(10, 3)
        assert [h.sign_at(i) for i in range(1, 11)] == [1] * 7 + [-1] * 3
        assert np.array_equal(h.signs(), np.array([1] * 7 + [-1] * 3, dtype=np.int8))

    def test_tail_zero_is_all_plus(self):
        h = TailMinusHypothesis(5, 0)
        assert np.array_equal(h.signs(), np.ones(5, dtype=np.int8))

    def test_tail_key_and_equality(self):
        assert TailMinusHypothesis(10, 3) == TailMinusHypothesis(10, 3)
        assert TailMinusHypothesis(10, 3) != TailMinusHypothesis(10, 2)
        assert TailMinusHypothesis(10, 3).key == ("tail", 3)

    def test_explicit_rejects_nonsigns(self):
        with pytest.raises(ValueError):
            ExplicitHypothesis(np.array([1, 0, -1], dtype=np.int8))

    def test_explicit_signs_at(self):
        h = ExplicitHypothesis(np.array([1, -1, 1, -1], dtype=np.int8), label="x")
        assert np.array_equal(
            h.signs_at(np.array([2, 4, 1], dtype=np.int64)),
            np.array([-1, -1, 1], dtype=np.int8),
        )
        assert h.key == ("explicit", "x")

    def test_sign_at_range_checked(self):
        h = TailMinusHypothesis(10, 3)
        with pytest.raises(IndexError):
            h.sign_at(0)
        with pytest.raises(IndexError):
            h.sign_at(11)

    def test_random_hypothesis_signs_consistent(self):
        key = bitgen.hyp_key(11, bitgen.STREAM_QUOTA, 4)
        h = RandomHypothesis(130, key, ("quota", 4))
        full = h.signs()
        assert full.shape == (130,)
        idx = np.arange(1, 131, dtype=np.int64)
        assert np.array_equal(h.signs_at(idx), full)
        # regenerated, not cached: a second call returns an equal fresh array
        again = h.signs()
        assert again is not full
        assert np.array_equal(again, full)


class TestSamples:
    def test_draw_convention_matches_oracle(self):
        got = draw_sample(Universe(100), 37, seed=5)
        assert np.array_equal(got.draws, naive_draws(100, 37, 5))

    def test_draws_validated(self):
        with pytest.raises(ValueError):
            SampleSet(Universe(10), np.array([], dtype=np.int64))
        with pytest.raises(ValueError):
            SampleSet(Universe(10), np.array([0, 3], dtype=np.int64))
        with pytest.raises(ValueError):
            SampleSet(Universe(10), np.array([3, 11], dtype=np.int64))

    def test_distinct_and_complement(self):
        s = SampleSet(Universe(8), np.array([5, 2, 5, 7, 2], dtype=np.int64))
        assert np.array_equal(s.distinct, np.array([2, 5, 7], dtype=np.int64))
        assert list(s.complement_iterator()) == [1, 3, 4, 6, 8]
        assert s.m == 5

    def test_complement_empty_when_cover(self):
        s = SampleSet(Universe(3), np.array([1, 2, 3, 2], dtype=np.int64))
        assert list(s.complement_iterator()) == []


class TestSampleDistribution:
    def test_uniform(self):
        d = SampleDistribution.uniform(np.array([2, 5, 9], dtype=np.int64))
        assert np.allclose(d.mass, 1 / 3)
        assert abs(float(d.mass.sum()) - 1.0) <= 1e-12

    def test_rejects_bad_support(self):
        with pytest.raises(ValueError, match="ascending"):
            SampleDistribution(np.array([5, 2], dtype=np.int64), np.array([0.5, 0.5]))
        with pytest.raises(ValueError, match="positive"):
            SampleDistribution(np.array([1, 2], dtype=np.int64), np.array([1.0, 0.0]))
        with pytest.raises(ValueError, match="sum to 1"):
            SampleDistribution(np.array([1, 2], dtype=np.int64), np.array([0.6, 0.6]))

    def test_mass_at_most(self):
        d = SampleDistribution(
            np.array([2, 5, 9], dtype=np.int64), np.array([0.2, 0.3, 0.5])
        )
        assert d.mass_at_most(1) == 0.0
        assert d.mass_at_most(2) == pytest.approx(0.2, abs=0)
        assert d.mass_at_most(5) == pytest.approx(0.5, abs=1e-15)
        assert d.mass_at_most(8) == pytest.approx(0.5, abs=1e-15)
        assert d.mass_at_most(9) == pytest.approx(1.0, abs=1e-15)

    @given(st.integers(min_value=0, max_value=2**32))
    @settings(max_examples=30, deadline=None)
    def test_advantage_matches_oracle(self, seed):
        rng = np.random.default_rng(seed)
        support = np.unique(rng.integers(1, 60, size=12, dtype=np.int64))
        raw = rng.random(len(support)) + 0.01
        d = SampleDistribution(support, raw / raw.sum())
        h = ExplicitHypothesis(
            rng.choice(np.array([-1, 1], dtype=np.int8), size=60), label="o"
        )
        got = advantage(h, d)
        want = naive_advantage(d.mass, h.signs_at(d.indices))
        assert got == pytest.approx(want, abs=1e-12)


class TestVotingClassifier:
    def test_validation(self):
        h = TailMinusHypothesis(10, 0)
        with pytest.raises(ValueError, match="at least one term"):
            VotingClassifier(())
        with pytest.raises(ValueError, match="nonnegative"):
            VotingClassifier(((1.5, h), (-0.5, h)))
        with pytest.raises(ValueError, match="sum to 1"):
            VotingClassifier(((0.4, h),))
        with pytest.raises(ValueError, match="one universe"):
            VotingClassifier(((0.5, h), (0.5, TailMinusHypothesis(11, 0))))

    def test_margins_bitwise_equal_naive(self):
        for seed in range(5):
            f, rows = _random_classifier(u=80, n_terms=7, seed=seed)
            weights = [w for w, _ in f.terms]
            got = f.margins()
            for p0 in range(80):
                assert got[p0] == naive_margin(weights, rows, p0)
            # error count agrees exactly, not approximately
            want_count = naive_error_count(weights, rows, 80)
            assert exact_error(f, Universe(80)) == want_count / 80

    def test_margins_at_matches_margins(self):
        f, _ = _random_classifier(u=64, n_terms=5, seed=9)
        idx = np.array([1, 17, 30, 64], dtype=np.int64)
        assert np.array_equal(f.margins_at(idx), f.margins()[idx - 1])

    def test_margin_scalar_matches_vector(self):
        f, _ = _random_classifier(u=50, n_terms=6, seed=2)
        m = f.margins()
        for i in (1, 25, 50):
            assert margin(f, i) == m[i - 1]

    def test_zero_margin_predicts_plus_one(self):
        h = ExplicitHypothesis(np.array([1, 1, -1], dtype=np.int8), label="a")
        g = ExplicitHypothesis(np.array([-1, 1, 1], dtype=np.int8), label="b")
        f = VotingClassifier(((0.5, h), (0.5, g)))
        assert np.array_equal(f.margins(), np.array([0.0, 1.0, 0.0]))
        assert np.array_equal(f.predictions(), np.array([1, 1, 1], dtype=np.int8))
        assert exact_error(f, Universe(3)) == 0.0

    def test_weight_on_sums_matching_terms(self):
        h = TailMinusHypothesis(6, 2)
        g = TailMinusHypothesis(6, 0)
        f = VotingClassifier(((0.25, h), (0.5, g), (0.25, TailMinusHypothesis(6, 2))))
        assert f.weight_on(("tail", 2)) == 0.5
        assert f.weight_on(("tail", 0)) == 0.5
        assert f.weight_on(("tail", 5)) == 0.0

    def test_exact_error_counts_strict_negatives(self):
        h = ExplicitHypothesis(np.array([-1, -1, 1, 1], dtype=np.int8), label="h")
        f = VotingClassifier(((1.0, h),))
        assert exact_error(f, Universe(4)) == 0.5
        with pytest.raises(ValueError):
            exact_error(f, Universe(5))
