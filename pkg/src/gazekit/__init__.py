"""gazekit: gaze analytics engine.

Fixation detection, AOI scanpath metrics, similarity matrices, attention
density maps, saccade bundling, scoped sessions, and a small HTTP service
that the bundled web UI talks to.
"""

from __future__ import annotations

from .errors import GazekitError
from .model import (
    ALL_SAMPLES,
    Aoi,
    DensityGrid,
    Dim,
    Fixation,
    GazeSample,
    GroupTable,
    MetricMatrix,
    MetricValue,
    Polygon,
    Rect,
    Saccade,
    Scope,
    Selector,
    Twi,
    dataset_validate,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_SAMPLES",
    "Aoi",
    "DensityGrid",
    "Dim",
    "Fixation",
    "GazeSample",
    "GazekitError",
    "GroupTable",
    "MetricMatrix",
    "MetricValue",
    "Polygon",
    "Rect",
    "Saccade",
    "Scope",
    "Selector",
    "Twi",
    "__version__",
    "dataset_validate",
]
