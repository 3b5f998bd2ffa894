"""Shipped synthetic datasets.

Two small sessions with exactly known ground truth: a staged-AOI recording
whose hit-any-AOI rate climbs 0.77 / 0.88 / 0.93 as the AOI grows, and a
six-fixation recording whose visit sequence is A, B, gap, A, C, A.  Both are
used by the demos, the acceptance tests, and the UI linking test.
"""

from __future__ import annotations

import numpy as np

from .model import Aoi, GazeSample, Rect
from .session import Session

__all__ = [
    "HAAR_STAGE_WIDTHS",
    "haar_session",
    "haar_stage_rect",
    "linking_session",
]

# Cluster k sits at x = 100k + 50; a stage of width 100h covers exactly the
# first h of the 100 clusters.
HAAR_STAGE_WIDTHS = (7700.0, 8800.0, 9300.0)

_CLUSTER_SPACING = 100.0
_CLUSTER_COUNT = 100
_POINTS_PER_CLUSTER = 5


def _clustered_sample(sample_id: str, centers: list[tuple[float, float]]) -> GazeSample:
    """One tight 120 ms cluster of points per requested center.

    Clusters are spaced far apart in both x and time, so dispersion-threshold
    detection at the defaults yields exactly one fixation per cluster with
    the cluster center as its centroid.
    """
    t = []
    x = []
    y = []
    for k, (cx, cy) in enumerate(centers):
        base = 200.0 * k
        for p in range(_POINTS_PER_CLUSTER):
            t.append(base + 30.0 * p)
            x.append(cx)
            y.append(cy)
    return GazeSample(id=sample_id, label=sample_id, t=np.array(t), x=np.array(x), y=np.array(y))


def haar_stage_rect(stage: int) -> Rect:
    if not 0 <= stage < len(HAAR_STAGE_WIDTHS):
        raise IndexError(f"stage must be 0..{len(HAAR_STAGE_WIDTHS) - 1}, got {stage}")
    return Rect(x=0.0, y=0.0, w=HAAR_STAGE_WIDTHS[stage], h=1000.0)


def haar_session(stage: int = 0) -> Session:
    """100-fixation recording plus one growable AOI.

    Stage widths cover 77, 88, and 93 of the fixation clusters; enlarging
    the AOI through the stages replays the coverage-refinement arc without
    moving any fixation.
    """
    centers = [(_CLUSTER_SPACING * k + 50.0, 500.0) for k in range(_CLUSTER_COUNT)]
    sample = _clustered_sample("rec1", centers)
    aoi = Aoi(id="panel", name="panel", shape=haar_stage_rect(stage), precedence=0, group_id=0)
    return Session(samples=(sample,), aois=(aoi,))


def linking_session() -> Session:
    """Three AOIs and six fixations visiting A, B, (none), A, C, A.

    The gap fixation falls outside every AOI, which makes this the smallest
    dataset exercising every transition kind at once: one direct A-B pair,
    an indirect B-A pair across the gap, and a glance A-C-A at the end.
    """
    aois = (
        Aoi(id="A", name="A", shape=Rect(0.0, 0.0, 100.0, 100.0), precedence=0, group_id=0),
        Aoi(id="B", name="B", shape=Rect(200.0, 0.0, 100.0, 100.0), precedence=0, group_id=0),
        Aoi(id="C", name="C", shape=Rect(400.0, 0.0, 100.0, 100.0), precedence=0, group_id=0),
    )
    centers = [
        (50.0, 50.0),  # A
        (250.0, 50.0),  # B
        (650.0, 50.0),  # outside
        (50.0, 50.0),  # A
        (450.0, 50.0),  # C
        (50.0, 50.0),  # A
    ]
    sample = _clustered_sample("demo", centers)
    return Session(samples=(sample,), aois=aois)
