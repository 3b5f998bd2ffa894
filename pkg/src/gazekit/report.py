"""Flat metrics reporting: the one table the CLI writes and the API serves.

One row per (scope, entity, metric), where entity is either a sample id or
"sample:aoi".  Sample-level rows carry the unconditioned fixation stats,
hit-any-AOI rate, and saccade stats; per-AOI rows carry the AOI-conditioned
fixation and visit stats.
"""

from __future__ import annotations

from .aoi import haar
from .errors import EmptyInput
from .metrics import fixation_aoi_stats, saccade_stats
from .model import MetricValue, fmt_num
from .session import Session, resolve_scope

__all__ = ["metrics_rows", "serialize_metrics_tsv"]

METRICS_TSV_HEADER = "scope\tentity\tmetric_id\tvalue\tunit\tsupport"


def _row(scope: str, entity: str, mv: MetricValue) -> dict[str, object]:
    return {
        "scope": scope,
        "entity": entity,
        "metric_id": mv.metric_id,
        "value": mv.value,
        "unit": mv.unit,
        "support": mv.support,
    }


def metrics_rows(session: Session) -> list[dict[str, object]]:
    """The full metrics table under the session's scope.

    Scoping selects samples and windows; the time-animation fraction never
    applies here, metrics stay stable while animating.
    """
    view = resolve_scope(session)
    scope_str = str(session.scope)
    rows: list[dict[str, object]] = []
    for e in view.entries:
        per_sample: list[MetricValue] = []
        per_sample.extend(fixation_aoi_stats(e.labels, None, e.scoped_duration).values())
        try:
            haar_value = haar(e.labels)
            haar_support = len(e.labels)
        except EmptyInput:
            haar_value, haar_support = 0.0, 0
        per_sample.append(MetricValue("haar", haar_value, "fraction", haar_support, "fraction"))
        per_sample.extend(saccade_stats(e.saccades).values())
        for mv in sorted(per_sample, key=lambda m: m.metric_id):
            rows.append(_row(scope_str, e.sample_id, mv))
        for aoi in session.aois:
            stats = fixation_aoi_stats(e.labels, aoi.id, e.scoped_duration)
            for mv in sorted(stats.values(), key=lambda m: m.metric_id):
                rows.append(_row(scope_str, f"{e.sample_id}:{aoi.id}", mv))
    return rows


def serialize_metrics_tsv(rows: list[dict[str, object]]) -> bytes:
    lines = [METRICS_TSV_HEADER]
    for r in rows:
        lines.append(
            "\t".join(
                (
                    str(r["scope"]),
                    str(r["entity"]),
                    str(r["metric_id"]),
                    fmt_num(float(r["value"])),  # type: ignore[arg-type]
                    str(r["unit"]),
                    str(r["support"]),
                )
            )
        )
    return ("\n".join(lines) + "\n").encode("utf-8")
