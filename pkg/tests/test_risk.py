import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from launchlab.risk import (
    HISTOGRAM_BINS,
    POST_WINDOW_SECONDS,
    LabelThresholds,
    PostSeries,
    annotate_corpus,
    heuristic_manipulation_score,
    label,
    min_price_ratio,
)

N = POST_WINDOW_SECONDS


def flat_series(price=100.0, flow=0.0):
    return PostSeries(
        price=(price,) * N,
        buy_volume=(0.0,) * N,
        sell_volume=(0.0,) * N,
        tx_count=(0,) * N,
        net_flow=(flow,) * N,
    )


def series_with_prices(prices):
    assert len(prices) == N
    return PostSeries(
        price=tuple(prices),
        buy_volume=(1.0,) * N,
        sell_volume=(1.0,) * N,
        tx_count=(2,) * N,
        net_flow=(0.0,) * N,
    )


class TestMinPriceRatio:
    def test_flat_price_is_one(self):
        assert min_price_ratio(flat_series(100.0), 100.0) == pytest.approx(1.0)

    def test_dip_inside_window(self):
        prices = [100.0] * N
        prices[300] = 15.0  # minute 5
        assert min_price_ratio(series_with_prices(prices), 100.0) == pytest.approx(0.15)

    def test_dip_outside_window_ignored(self):
        prices = [100.0] * N
        prices[600] = 80.0  # minute 10, inside
        prices[1500] = 50.0  # minute 25, outside the 20-minute window
        assert min_price_ratio(series_with_prices(prices), 100.0) == pytest.approx(0.8)

    def test_window_monotonicity(self):
        prices = [100.0] * N
        prices[1500] = 40.0
        s = series_with_prices(prices)
        assert min_price_ratio(s, 100.0, window_minutes=30) <= min_price_ratio(
            s, 100.0, window_minutes=20
        )

    def test_rescaling_invariance(self):
        prices = [100.0 - i / 100 for i in range(N)]
        s1 = series_with_prices(prices)
        s2 = series_with_prices([p * 7 for p in prices])
        assert min_price_ratio(s1, 100.0) == pytest.approx(min_price_ratio(s2, 700.0))

    def test_zero_migration_price_rejected(self):
        with pytest.raises(ValueError):
            min_price_ratio(flat_series(), 0.0)

    def test_empty_window_rejected(self):
        with pytest.raises(ValueError):
            min_price_ratio(flat_series(), 100.0, window_minutes=0)

    @given(st.integers(min_value=0, max_value=2**31))
    @settings(max_examples=50)
    def test_window_monotone_on_random_series(self, seed):
        import random

        rng = random.Random(seed)
        price = 100.0
        prices = []
        for _ in range(N):
            price = max(1e-6, price * (1 + rng.gauss(0, 0.01)))
            prices.append(price)
        s = series_with_prices(prices)
        ratios = [min_price_ratio(s, 100.0, w) for w in (5, 10, 20, 40, 60)]
        assert all(a >= b for a, b in zip(ratios, ratios[1:]))


class TestLabelRule:
    def test_severe_collapse_is_high(self):
        assert label(0.25, 0.1) == "high"

    def test_low_requires_both_conditions(self):
        assert label(0.9, 0.1) == "low"

    def test_residual_class_is_medium(self):
        assert label(0.5, 0.5) == "medium"

    def test_likely_manipulated_is_high(self):
        assert label(0.9, 0.8) == "high"

    def test_boundaries(self):
        assert label(0.3, 0.0) == "medium"  # ratio < 0.3 is strict
        assert label(0.0, 0.0) == "high"
        assert label(0.7, 0.29999) == "low"  # ratio >= 0.7 inclusive
        assert label(0.7, 0.3) == "medium"  # score < 0.3 strict
        assert label(1.0, 0.7) == "high"  # score >= 0.7 inclusive

    def test_grid_partition_totality(self):
        for i in range(101):
            for j in range(101):
                level = label(i / 100, j / 100)
                assert level in ("high", "medium", "low")

    @given(
        ratio=st.floats(min_value=0, max_value=1),
        score=st.floats(min_value=0, max_value=1),
        delta=st.floats(min_value=0, max_value=1),
    )
    def test_monotonicity(self, ratio, score, delta):
        order = {"low": 0, "medium": 1, "high": 2}
        base = order[label(ratio, score)]
        assert order[label(max(ratio - delta, 0.0), score)] >= base
        assert order[label(ratio, min(score + delta, 1.0))] >= base

    def test_configurable_thresholds(self):
        strict = LabelThresholds(high_ratio=0.5, high_score=0.5, low_ratio=0.9, low_score=0.1)
        assert label(0.45, 0.0, strict) == "high"
        assert label(0.85, 0.05, strict) == "medium"


class TestHeuristicScore:
    def test_constant_series_scores_zero(self):
        assert heuristic_manipulation_score(flat_series()) == 0.0

    def test_organic_profile_scores_low(self):
        from launchlab.sim import synthetic_post_series

        scores = [
            heuristic_manipulation_score(synthetic_post_series("low", seed))
            for seed in range(25)
        ]
        assert max(scores) < 0.3

    def test_manipulated_profile_scores_high(self):
        from launchlab.sim import synthetic_post_series

        scores = [
            heuristic_manipulation_score(synthetic_post_series("manipulated", seed))
            for seed in range(25)
        ]
        assert min(scores) >= 0.7

    def test_deterministic(self):
        from launchlab.sim import synthetic_post_series

        s = synthetic_post_series("manipulated", 5)
        assert heuristic_manipulation_score(s) == heuristic_manipulation_score(s)


class TestAnnotateCorpus:
    def _series(self, ratio):
        prices = [100.0] * N
        prices[60] = 100.0 * ratio
        return series_with_prices(prices)

    def test_histogram_bins(self):
        series = {"a": self._series(0.1), "b": self._series(0.5), "c": flat_series(100.0)}
        prices = {m: 100.0 for m in series}
        report = annotate_corpus(series, prices, ["a", "b", "c"])
        assert report.histogram == [1, 0, 1, 0, 0, 1]
        assert len(HISTOGRAM_BINS) == 6

    def test_missing_series_skipped_with_warning(self):
        report = annotate_corpus({}, {}, ["ghost"])
        assert report.skipped == ["ghost"]
        assert report.labels == []

    def test_empty_corpus(self):
        report = annotate_corpus({}, {}, [])
        assert report.labels == [] and report.histogram == [0] * 6

    def test_external_scores_override_heuristic(self):
        series = {"a": flat_series(100.0)}
        report = annotate_corpus(series, {"a": 100.0}, ["a"], external_scores={"a": 0.95})
        assert report.labels[0].pred_score == 0.95
        assert report.labels[0].level == "high"
