"""Metric values and group pooling.

aggregate_group is checked against recomputation over the pooled underlying
events: a group's mean must equal the plain mean of all member events, and a
group's median the median of the concatenated event lists.
"""

import numpy as np
import pytest

from gazekit.aoi import LabeledFixation
from gazekit.errors import MixedMetric
from gazekit.metrics import aggregate_group, fixation_aoi_stats, histogram, saccade_stats
from gazekit.model import Fixation, MetricValue, Saccade


def fx(i, duration, aoi):
    t0 = 1000.0 * i
    f = Fixation(index=i, cx=0.0, cy=0.0, t_start=t0, t_end=t0 + duration,
                 duration=float(duration), point_span=(i, i + 1))
    return LabeledFixation(f, aoi)


def test_fixation_stats_worked_example():
    labels = [fx(0, 100, "A"), fx(1, 200, "A"), fx(2, 50, "B"), fx(3, 300, "A"), fx(4, 80, None)]
    stats = fixation_aoi_stats(labels, "A", total_duration_ms=1000.0)
    assert stats["fixation_count"].value == 3.0
    assert stats["total_duration"].value == 600.0
    assert stats["mean_duration"].value == 200.0
    assert stats["median_duration"].value == 200.0
    assert stats["median_duration"].events == (100.0, 200.0, 300.0)
    assert stats["pct_time"].value == 0.6
    assert stats["visit_count"].value == 2.0  # A,A then A
    assert stats["mean_visit_duration"].value == 300.0
    assert stats["fixation_count"].support == 3


def test_fixation_stats_aoi_set_merges_visits():
    labels = [fx(0, 100, "A"), fx(1, 100, "B"), fx(2, 100, "A")]
    merged = fixation_aoi_stats(labels, {"A", "B"}, 300.0)
    assert merged["visit_count"].value == 1.0
    assert merged["mean_visit_duration"].value == 300.0
    single = fixation_aoi_stats(labels, "A", 300.0)
    assert single["visit_count"].value == 2.0


def test_fixation_stats_unconditioned():
    labels = [fx(0, 100, "A"), fx(1, 100, None), fx(2, 100, "B")]
    stats = fixation_aoi_stats(labels, None, 600.0)
    assert stats["fixation_count"].value == 3.0
    assert stats["pct_time"].value == 0.5
    assert stats["visit_count"].value == 1.0  # condition dropped: one long run


def test_fixation_stats_empty_selection():
    stats = fixation_aoi_stats([fx(0, 100, "B")], "A", 100.0)
    for m in stats.values():
        assert m.value == 0.0 and m.support == 0
    stats = fixation_aoi_stats([], "A", 0.0)
    assert stats["pct_time"].value == 0.0


def test_fixation_stats_randomized_against_recompute():
    rng = np.random.default_rng(21)
    for _ in range(100):
        n = int(rng.integers(0, 30))
        durs = rng.uniform(50, 500, n)
        ids = [["A", "B", None][k] for k in rng.integers(0, 3, n)]
        labels = [fx(i, durs[i], ids[i]) for i in range(n)]
        span = float(durs.sum()) + 1000.0
        stats = fixation_aoi_stats(labels, "A", span)
        mine = [d for d, a in zip(durs, ids) if a == "A"]
        assert stats["fixation_count"].value == len(mine)
        assert stats["total_duration"].value == pytest.approx(sum(mine), abs=1e-9)
        if mine:
            assert stats["mean_duration"].value == pytest.approx(np.mean(mine))
            assert stats["median_duration"].value == pytest.approx(np.median(mine))
        assert stats["pct_time"].value == pytest.approx(sum(mine) / span)
        runs = sum(1 for i, a in enumerate(ids) if a == "A" and (i == 0 or ids[i - 1] != "A"))
        assert stats["visit_count"].value == runs


def test_saccade_stats():
    saccades = [
        Saccade(0, 1, 30.0, 50.0, 0.0),
        Saccade(1, 2, 40.0, 70.0, 1.0),
        Saccade(2, 3, 50.0, 30.0, 2.0),
    ]
    stats = saccade_stats(saccades)
    assert stats["saccade_count"].value == 3.0
    assert stats["mean_saccade_length"].value == 40.0
    assert stats["median_saccade_length"].value == 40.0
    assert stats["mean_saccade_duration"].value == 50.0


def test_saccade_stats_empty():
    stats = saccade_stats([])
    assert set(stats) == {
        "saccade_count", "mean_saccade_length", "median_saccade_length", "mean_saccade_duration",
    }
    for m in stats.values():
        assert m.value == 0.0 and m.support == 0


# -- group aggregation -------------------------------------------------------


def test_aggregate_sum():
    parts = [MetricValue("fixation_count", 3.0, "count", 3, "sum"),
             MetricValue("fixation_count", 5.0, "count", 5, "sum")]
    got = aggregate_group(parts)
    assert got.value == 8.0 and got.support == 8 and got.kind == "sum"


def test_aggregate_mean_equals_pooled_mean():
    rng = np.random.default_rng(33)
    for _ in range(200):
        chunks = [rng.uniform(0, 100, int(rng.integers(0, 8))) for _ in range(int(rng.integers(1, 6)))]
        events = np.concatenate(chunks) if chunks else np.array([])
        parts = [
            MetricValue("mean_duration", float(c.mean()) if c.size else 0.0, "ms", c.size, "mean")
            for c in chunks
        ]
        got = aggregate_group(parts)
        want = float(events.mean()) if events.size else 0.0
        assert got.value == pytest.approx(want, abs=1e-12)
        assert got.support == events.size


def test_aggregate_median_pools_events():
    rng = np.random.default_rng(34)
    for _ in range(200):
        chunks = [tuple(rng.uniform(0, 100, int(rng.integers(0, 8)))) for _ in range(int(rng.integers(1, 6)))]
        parts = [
            MetricValue("median_duration", float(np.median(c)) if c else 0.0, "ms", len(c), "median", c)
            for c in chunks
        ]
        got = aggregate_group(parts)
        pooled = [v for c in chunks for v in c]
        want = float(np.median(pooled)) if pooled else 0.0
        assert got.value == pytest.approx(want, abs=1e-12)
        assert got.events == tuple(pooled)


def test_aggregate_median_without_events_falls_back_to_weighted_mean():
    parts = [MetricValue("median_duration", 10.0, "ms", 1, "median"),
             MetricValue("median_duration", 20.0, "ms", 3, "median")]
    got = aggregate_group(parts)
    assert got.value == pytest.approx(17.5)


def test_aggregate_fraction_support_weighted():
    parts = [MetricValue("pct_time", 0.5, "fraction", 2, "fraction"),
             MetricValue("pct_time", 0.1, "fraction", 8, "fraction")]
    got = aggregate_group(parts)
    assert got.value == pytest.approx((0.5 * 2 + 0.1 * 8) / 10)


def test_aggregate_zero_support():
    parts = [MetricValue("mean_duration", 0.0, "ms", 0, "mean")] * 2
    assert aggregate_group(parts).value == 0.0


def test_aggregate_rejects_mixed_metrics():
    with pytest.raises(MixedMetric):
        aggregate_group([])
    with pytest.raises(MixedMetric):
        aggregate_group([
            MetricValue("mean_duration", 1.0, "ms", 1, "mean"),
            MetricValue("total_duration", 1.0, "ms", 1, "sum"),
        ])
    with pytest.raises(MixedMetric):
        aggregate_group([
            MetricValue("x", 1.0, "ms", 1, "mean"),
            MetricValue("x", 1.0, "count", 1, "mean"),
        ])


# -- histogram ---------------------------------------------------------------


def test_histogram_worked_example():
    edges, counts = histogram([1, 2, 3, 4], 2)
    assert edges.tolist() == [1.0, 2.5, 4.0]
    assert counts.tolist() == [2, 2]  # max value lands in the last bin


def test_histogram_all_equal_and_empty():
    edges, counts = histogram([5.0, 5.0, 5.0], 2)
    assert counts.sum() == 3 and edges[0] < 5.0 < edges[-1]
    edges, counts = histogram([], 4)
    assert edges.size == 0 and counts.size == 0
    with pytest.raises(ValueError):
        histogram([1.0], 0)


def test_histogram_mass_conserved_randomized():
    rng = np.random.default_rng(35)
    for _ in range(50):
        vals = rng.uniform(-10, 10, int(rng.integers(1, 200)))
        bins = int(rng.integers(1, 20))
        edges, counts = histogram(vals, bins)
        assert counts.sum() == vals.size
        assert len(edges) == bins + 1
