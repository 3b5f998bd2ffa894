"""Zip-bundle export and import.

One bundle holds everything needed to rebuild a session: raw gaze TSVs,
entity definitions, group assignments, parameter configuration, plus the
derived fixation/saccade/metric files for external consumers.  On import the
raw points are authoritative; derived members are only cross-checked against
recomputation and a :class:`RecomputationMismatch` warning is emitted when
they disagree.  Zip metadata is pinned (fixed timestamps, sorted members) so
exporting the same session twice gives byte-identical bundles.
"""

from __future__ import annotations

import io
import json
import warnings
import zipfile
from dataclasses import replace
from typing import Mapping, Sequence

from .aoi import LabeledFixation
from .bundling import BundleParams
from .density import KdeParams
from .errors import GazekitError, MalformedJson, MissingFile, RecomputationMismatch, SchemaMismatch
from .fixations import DetectionParams
from .ingest import (
    parse_aois_json,
    parse_gaze_tsv,
    parse_groups_json,
    parse_twi_tsv,
    serialize_aois_json,
    serialize_gaze_tsv,
    serialize_groups_json,
    serialize_twi_tsv,
)
from .matrixops import build_matrix
from .model import Dim, MetricMatrix, Saccade, Scope, fmt_num
from .session import MatrixSpec, Session, labels_for, saccades_for
from .similarity import NwScoring

__all__ = [
    "BUNDLE_FORMAT",
    "export_bundle",
    "import_bundle",
    "serialize_fixations_tsv",
    "serialize_matrix_tsv",
    "serialize_saccades_tsv",
]

BUNDLE_FORMAT = 1

# Fixed zip timestamp: bundles of equal content must be equal bytes.
_EPOCH = (1980, 1, 1, 0, 0, 0)


def serialize_fixations_tsv(labels: Sequence[LabeledFixation]) -> bytes:
    """One row per fixation: index, cx, cy, t_start, t_end, duration, aoi_id."""
    lines = []
    for lf in labels:
        f = lf.fixation
        lines.append(
            "\t".join(
                (
                    str(f.index),
                    fmt_num(f.cx),
                    fmt_num(f.cy),
                    fmt_num(f.t_start),
                    fmt_num(f.t_end),
                    fmt_num(f.duration),
                    lf.aoi_id if lf.aoi_id is not None else "",
                )
            )
        )
    return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")


def serialize_saccades_tsv(saccades: Sequence[Saccade]) -> bytes:
    lines = [
        "\t".join(
            (
                str(s.from_fixation),
                str(s.to_fixation),
                fmt_num(s.length),
                fmt_num(s.duration),
                fmt_num(s.angle),
            )
        )
        for s in saccades
    ]
    return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")


def serialize_matrix_tsv(matrix: MetricMatrix) -> bytes:
    """Triplet form, canonical (unpermuted) order: row_id, col_id, value."""
    lines = ["row_id\tcol_id\tvalue"]
    for i, r in enumerate(matrix.row_ids):
        for j, c in enumerate(matrix.col_ids):
            lines.append(f"{r}\t{c}\t{fmt_num(float(matrix.values[i, j]))}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _params_config(session: Session) -> dict[str, object]:
    d = session.detection_params
    k = session.kde_params
    b = session.bundle_params
    n = session.nw_scoring
    return {
        "detection_params": {
            "dispersion_threshold": d.dispersion_threshold,
            "min_duration": d.min_duration,
        },
        "kde_params": {
            "kernel": k.kernel,
            "bandwidth": k.bandwidth,
            "grid_width": k.grid_width,
            "weighting": k.weighting,
        },
        "bundle_params": {
            "iterations": b.iterations,
            "kernel_bandwidth": b.kernel_bandwidth,
            "smoothing": b.smoothing,
            "direction_split_deg": b.direction_split_deg,
        },
        "nw_scoring": {"match": n.match, "mismatch": n.mismatch, "gap": n.gap},
    }


def _spec_config(spec: MatrixSpec) -> dict[str, object]:
    return {
        "id": spec.id,
        "rows": spec.rows.value,
        "cols": spec.cols.value,
        "metric": spec.metric,
        "reorder": spec.reorder,
    }


def export_bundle(session: Session) -> bytes:
    """Snapshot the session as deterministic zip bytes."""
    members: dict[str, bytes | None] = {
        "samples/": None,
        "fixations/": None,
        "saccades/": None,
        "metrics/": None,
    }
    # Entity records can lag behind the live group table, so files carry the
    # table's effective gid.
    groups = session.groups

    for s in session.samples:
        members[f"samples/{s.id}.tsv"] = serialize_gaze_tsv(s)
        members[f"fixations/{s.id}.tsv"] = serialize_fixations_tsv(labels_for(session, s.id))
        members[f"saccades/{s.id}.tsv"] = serialize_saccades_tsv(saccades_for(session, s.id))

    members["aois.json"] = serialize_aois_json(
        [replace(a, group_id=groups.gid_of(Dim.AOI, a.id)) for a in session.aois]
    )
    members["twis.tsv"] = serialize_twi_tsv(
        replace(w, group_id=groups.gid_of(Dim.TWI, w.id)) for w in session.twis
    )
    members["groups.json"] = serialize_groups_json(groups)

    orderings: dict[str, dict[str, list[int]]] = {}
    for spec in session.matrix_specs:
        matrix = build_matrix(session, spec)
        members[f"metrics/{spec.id}.tsv"] = serialize_matrix_tsv(matrix)
        if matrix.row_order is not None:
            orderings[spec.id] = {
                "rows": list(matrix.row_order),
                "cols": list(matrix.col_order or []),
            }

    config = {
        "bundle_format": BUNDLE_FORMAT,
        "dataset_version": session.dataset_version,
        "scope": str(session.scope),
        "time_fraction": session.time_fraction,
        "matrices": [_spec_config(spec) for spec in session.matrix_specs],
        "orderings": orderings,
        **_params_config(session),
    }
    members["config.json"] = (json.dumps(config, indent=2, sort_keys=True) + "\n").encode("utf-8")

    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w") as zf:
        for name in sorted(members):
            data = members[name]
            info = zipfile.ZipInfo(name, date_time=_EPOCH)
            if data is None:
                info.external_attr = (0o755 << 16) | 0x10
                zf.writestr(info, b"", compress_type=zipfile.ZIP_STORED)
            else:
                info.external_attr = 0o644 << 16
                zf.writestr(info, data, compress_type=zipfile.ZIP_DEFLATED)
    return buf.getvalue()


def _required(zf: zipfile.ZipFile, names: set[str], member: str) -> bytes:
    if member not in names:
        raise MissingFile(member)
    return zf.read(member)


def _cfg_get(cfg: Mapping[str, object], key: str, default: object) -> object:
    value = cfg.get(key, default)
    return default if value is None else value


def import_bundle(data: bytes) -> Session:
    """Rebuild a session from bundle bytes.

    Raises MissingFile/SchemaMismatch on structural problems; disagreement
    between a derived member and recomputation only warns (raw points win).
    """
    try:
        zf = zipfile.ZipFile(io.BytesIO(data))
    except zipfile.BadZipFile as exc:
        raise SchemaMismatch("<bundle>", f"not a zip archive: {exc}") from exc
    names = {n for n in zf.namelist() if not n.endswith("/")}

    def parse(member: str, parser, raw: bytes):
        try:
            return parser(raw)
        except GazekitError as exc:
            raise SchemaMismatch(member, str(exc)) from exc

    try:
        cfg = json.loads(_required(zf, names, "config.json").decode("utf-8"))
        if not isinstance(cfg, dict):
            raise MalformedJson("config.json must hold a JSON object")
    except (UnicodeDecodeError, json.JSONDecodeError, MalformedJson) as exc:
        raise SchemaMismatch("config.json", str(exc)) from exc

    aois = parse("aois.json", parse_aois_json, _required(zf, names, "aois.json"))
    twis = parse("twis.tsv", parse_twi_tsv, _required(zf, names, "twis.tsv"))
    groups = parse("groups.json", parse_groups_json, _required(zf, names, "groups.json"))

    samples = []
    for name in sorted(names):
        if name.startswith("samples/") and name.endswith(".tsv"):
            sid = name[len("samples/") : -len(".tsv")]
            sample, _windows = parse(name, lambda raw: parse_gaze_tsv(raw, sample_id=sid), zf.read(name))
            samples.append(sample)

    try:
        pd = dict(_cfg_get(cfg, "detection_params", {}))
        pk = dict(_cfg_get(cfg, "kde_params", {}))
        pb = dict(_cfg_get(cfg, "bundle_params", {}))
        pn = dict(_cfg_get(cfg, "nw_scoring", {}))
        specs = tuple(
            MatrixSpec(
                id=str(s["id"]),
                rows=Dim.parse(str(s["rows"])),
                cols=Dim.parse(str(s["cols"])),
                metric=str(s["metric"]),
                reorder=str(s.get("reorder", "none")),
            )
            for s in _cfg_get(cfg, "matrices", [])
        )
        session = Session(
            dataset_version=int(_cfg_get(cfg, "dataset_version", 1)),
            samples=tuple(samples),
            aois=tuple(aois),
            twis=tuple(twis),
            groups=groups,
            detection_params=DetectionParams(**pd),
            kde_params=KdeParams(**pk),
            bundle_params=BundleParams(**pb),
            nw_scoring=NwScoring(**pn),
            scope=Scope.parse(str(_cfg_get(cfg, "scope", "all/all"))),
            time_fraction=float(_cfg_get(cfg, "time_fraction", 1.0)),
            matrix_specs=specs,
        )
    except (KeyError, TypeError, ValueError, GazekitError) as exc:
        raise SchemaMismatch("config.json", str(exc)) from exc

    _cross_check(zf, names, session)
    return session


def _warn_mismatch(member: str, detail: str) -> None:
    warnings.warn(RecomputationMismatch(f"{member}: {detail}"), stacklevel=3)


def _cross_check(zf: zipfile.ZipFile, names: set[str], session: Session) -> None:
    spec_by_id = {spec.id: spec for spec in session.matrix_specs}
    for name in sorted(names):
        if name.startswith("fixations/") and name.endswith(".tsv"):
            sid = name[len("fixations/") : -len(".tsv")]
            if sid not in session.sample_map:
                _warn_mismatch(name, "no matching sample in bundle")
                continue
            if zf.read(name) != serialize_fixations_tsv(labels_for(session, sid)):
                _warn_mismatch(name, "does not match recomputed fixations; using recomputation")
        elif name.startswith("saccades/") and name.endswith(".tsv"):
            sid = name[len("saccades/") : -len(".tsv")]
            if sid not in session.sample_map:
                _warn_mismatch(name, "no matching sample in bundle")
                continue
            if zf.read(name) != serialize_saccades_tsv(saccades_for(session, sid)):
                _warn_mismatch(name, "does not match recomputed saccades; using recomputation")
        elif name.startswith("metrics/") and name.endswith(".tsv"):
            mid = name[len("metrics/") : -len(".tsv")]
            spec = spec_by_id.get(mid)
            if spec is None:
                _warn_mismatch(name, "no matching matrix spec in config.json")
                continue
            if zf.read(name) != serialize_matrix_tsv(build_matrix(session, spec)):
                _warn_mismatch(name, "does not match recomputed matrix; using recomputation")
