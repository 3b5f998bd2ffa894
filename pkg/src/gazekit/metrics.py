"""The descriptive metric catalogue and group aggregation.

Every value is returned as a :class:`MetricValue` carrying its unit, the
number of underlying events (support), and how it pools across groups.
Empty selections produce zero values with support 0 rather than errors so
metric matrices always render complete.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .aoi import LabeledFixation, visits as _visits
from .errors import MixedMetric
from .model import MetricValue, Saccade

__all__ = [
    "aggregate_group",
    "fixation_aoi_stats",
    "histogram",
    "saccade_stats",
]


def _median(values: Sequence[float]) -> float:
    return float(np.median(np.asarray(values, dtype=np.float64))) if values else 0.0


def _zero(metric_id: str, unit: str, kind: str) -> MetricValue:
    events: tuple[float, ...] | None = () if kind == "median" else None
    return MetricValue(metric_id=metric_id, value=0.0, unit=unit, support=0, kind=kind, events=events)


def fixation_aoi_stats(
    labels: Sequence[LabeledFixation],
    aoi_ids: str | Sequence[str] | None,
    total_duration_ms: float,
) -> dict[str, MetricValue]:
    """Fixation and visit statistics for one AOI (or a set forming a group).

    aoi_ids None drops the AOI condition entirely, for window-scoped
    statistics over every fixation.  pct_time divides total fixation time
    inside the AOI by the scoped recording span, so values across disjoint
    AOIs sum to at most 1.
    """
    if aoi_ids is None:
        member = list(labels)
        merged = [LabeledFixation(lf.fixation, "in") for lf in labels]
    else:
        wanted = {aoi_ids} if isinstance(aoi_ids, str) else set(aoi_ids)
        member = [lf for lf in labels if lf.aoi_id in wanted]
        merged = [
            LabeledFixation(lf.fixation, "in" if lf.aoi_id in wanted else None) for lf in labels
        ]
    durations = tuple(lf.fixation.duration for lf in member)
    n = len(member)

    vs = _visits(merged)
    visit_durs = tuple(v.duration for v in vs)

    total = float(sum(durations))
    pct = total / total_duration_ms if total_duration_ms > 0 else 0.0
    return {
        "fixation_count": MetricValue("fixation_count", float(n), "count", n, "sum"),
        "total_duration": MetricValue("total_duration", total, "ms", n, "sum"),
        "mean_duration": MetricValue("mean_duration", total / n if n else 0.0, "ms", n, "mean"),
        "median_duration": MetricValue(
            "median_duration", _median(durations), "ms", n, "median", durations
        ),
        "pct_time": MetricValue("pct_time", pct, "fraction", n, "fraction"),
        "visit_count": MetricValue("visit_count", float(len(vs)), "count", len(vs), "sum"),
        "mean_visit_duration": MetricValue(
            "mean_visit_duration",
            float(sum(visit_durs)) / len(vs) if vs else 0.0,
            "ms",
            len(vs),
            "mean",
        ),
    }


def saccade_stats(saccades: Sequence[Saccade]) -> dict[str, MetricValue]:
    n = len(saccades)
    if n == 0:
        return {
            "saccade_count": _zero("saccade_count", "count", "sum"),
            "mean_saccade_length": _zero("mean_saccade_length", "stimulus-units", "mean"),
            "median_saccade_length": _zero("median_saccade_length", "stimulus-units", "median"),
            "mean_saccade_duration": _zero("mean_saccade_duration", "ms", "mean"),
        }
    lengths = tuple(s.length for s in saccades)
    durations = [s.duration for s in saccades]
    return {
        "saccade_count": MetricValue("saccade_count", float(n), "count", n, "sum"),
        "mean_saccade_length": MetricValue(
            "mean_saccade_length", float(sum(lengths)) / n, "stimulus-units", n, "mean"
        ),
        "median_saccade_length": MetricValue(
            "median_saccade_length", _median(lengths), "stimulus-units", n, "median", lengths
        ),
        "mean_saccade_duration": MetricValue(
            "mean_saccade_duration", float(sum(durations)) / n, "ms", n, "mean"
        ),
    }


def aggregate_group(values: Sequence[MetricValue]) -> MetricValue:
    """Pool one metric across group members.

    Sums add; means and fractions combine support-weighted; medians are
    recomputed over the pooled events when every member carries them, else
    fall back to a support-weighted mean of member medians.
    """
    if not values:
        raise MixedMetric("nothing to aggregate")
    first = values[0]
    for v in values[1:]:
        if v.metric_id != first.metric_id or v.unit != first.unit or v.kind != first.kind:
            raise MixedMetric(f"cannot pool {v.metric_id}/{v.unit} with {first.metric_id}/{first.unit}")
    support = sum(v.support for v in values)
    if first.kind == "sum":
        value = float(sum(v.value for v in values))
    elif first.kind == "median":
        if all(v.events is not None for v in values):
            pooled: list[float] = []
            for v in values:
                pooled.extend(v.events)  # type: ignore[arg-type]
            value = _median(pooled)
            return MetricValue(first.metric_id, value, first.unit, support, "median", tuple(pooled))
        value = (
            sum(v.value * v.support for v in values) / support if support else 0.0
        )
    else:  # mean | fraction: support-weighted
        value = sum(v.value * v.support for v in values) / support if support else 0.0
    return MetricValue(first.metric_id, value, first.unit, support, first.kind)


def histogram(values: Sequence[float], bin_count: int) -> tuple[np.ndarray, np.ndarray]:
    """Equal-width histogram over [min, max]; max lands in the last bin.

    An all-equal input gets a width-1 range centered on the value; empty
    input gives empty edges and counts.
    """
    if bin_count < 1:
        raise ValueError(f"bin_count must be >= 1, got {bin_count}")
    arr = np.asarray(values, dtype=np.float64)
    if arr.size == 0:
        return np.array([]), np.array([], dtype=np.int64)
    counts, edges = np.histogram(arr, bins=bin_count)
    return edges, counts.astype(np.int64)
