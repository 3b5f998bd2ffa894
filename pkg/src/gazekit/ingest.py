"""Parsers and serializers for the exchange formats.

Gaze TSV: three tab-separated numeric fields per row (time in ms, x, y),
optionally a fourth label column from which per-sample time windows are
derived.  TWI TSV: 2-6 columns (start, end, [name], [gid], [sample], [id]).
Groups JSON: {"samples"|"aois"|"twis": {id: gid}}.  Blank lines and '#'
comments are tolerated everywhere; '.' is the only decimal separator.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    EmptyFile,
    InvertedWindow,
    MalformedJson,
    MalformedRow,
    NonMonotoneTime,
)
from .model import ALL_SAMPLES, Aoi, GazeSample, GroupTable, Polygon, Rect, Twi, fmt_num

__all__ = [
    "IngestOptions",
    "parse_aois_json",
    "parse_gaze_tsv",
    "parse_groups_json",
    "parse_twi_tsv",
    "safe_id",
    "serialize_aois_json",
    "serialize_gaze_tsv",
    "serialize_groups_json",
    "serialize_twi_tsv",
]

_UNSAFE = re.compile(r"[^A-Za-z0-9_.\-]")


def safe_id(text: str) -> str:
    """Collapse arbitrary text to the id charset (never empty)."""
    cleaned = _UNSAFE.sub("_", text)
    return cleaned or "_"


@dataclass(frozen=True)
class IngestOptions:
    has_header: str = "auto"  # "auto" | "yes" | "no"
    twi_column: bool = False  # read TWI labels from a 4th column
    decimal_separator: str = "."  # fixed; field kept for config parity

    def __post_init__(self) -> None:
        if self.has_header not in ("auto", "yes", "no"):
            raise ValueError(f"has_header must be auto|yes|no, got {self.has_header!r}")
        if self.decimal_separator != ".":
            raise ValueError("only '.' decimal separator is supported")


def _decode(data: bytes) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedRow(f"input is not UTF-8: {exc}") from exc


def _data_rows(text: str) -> list[tuple[int, list[str]]]:
    """(1-based line number, fields) for every non-blank, non-comment line."""
    rows: list[tuple[int, list[str]]] = []
    for line_no, line in enumerate(text.split("\n"), start=1):
        line = line.rstrip("\r")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        rows.append((line_no, line.split("\t")))
    return rows


def _parse_number(field: str, line_no: int) -> float:
    try:
        value = float(field)
    except ValueError:
        raise MalformedRow(f"unparseable number {field!r}", line_no) from None
    if not math.isfinite(value):
        raise MalformedRow(f"non-finite number {field!r}", line_no)
    return value


def _looks_numeric(field: str) -> bool:
    try:
        float(field)
    except ValueError:
        return False
    return True


def _median_interval(t: Sequence[float]) -> float:
    if len(t) < 2:
        return 1.0
    return float(np.median(np.diff(np.asarray(t, dtype=np.float64))))


def _unique_id(base: str, taken: set[str]) -> str:
    candidate = base
    k = 1
    while candidate in taken:
        k += 1
        candidate = f"{base}.{k}"
    taken.add(candidate)
    return candidate


def parse_gaze_tsv(
    data: bytes, sample_id: str, opts: IngestOptions = IngestOptions()
) -> tuple[GazeSample, list[Twi]]:
    """Parse one gaze TSV into a sample plus any 4th-column time windows.

    Rows must hold exactly 3 fields (or 4 with ``twi_column``); timestamps
    must strictly increase.  Maximal runs of rows sharing a non-empty label
    become one window each; a single-row run is widened by the file's median
    sampling interval so the window has positive length.
    """
    rows = _data_rows(_decode(data))
    if not rows:
        raise EmptyFile(f"sample {sample_id!r}: no data rows")

    if opts.has_header == "yes":
        rows = rows[1:]
    elif opts.has_header == "auto":
        first = rows[0][1]
        if any(not _looks_numeric(f) for f in first[:3]):
            rows = rows[1:]
    if not rows:
        raise EmptyFile(f"sample {sample_id!r}: header only, no data rows")

    want = 4 if opts.twi_column else 3
    ts: list[float] = []
    xs: list[float] = []
    ys: list[float] = []
    labels: list[str] = []
    for line_no, fields in rows:
        if len(fields) != want and not (opts.twi_column and len(fields) == 3):
            raise MalformedRow(f"expected {want} fields, got {len(fields)}", line_no)
        t = _parse_number(fields[0], line_no)
        x = _parse_number(fields[1], line_no)
        y = _parse_number(fields[2], line_no)
        if ts and t <= ts[-1]:
            raise NonMonotoneTime(f"timestamp {fmt_num(t)} does not increase past {fmt_num(ts[-1])}", line_no)
        ts.append(t)
        xs.append(x)
        ys.append(y)
        labels.append(fields[3].strip() if len(fields) > 3 else "")

    sample = GazeSample(id=sample_id, label=sample_id, t=ts, x=xs, y=ys)

    twis: list[Twi] = []
    if opts.twi_column:
        eps = _median_interval(ts)
        taken: set[str] = set()
        run_start = 0
        for k in range(1, len(labels) + 1):
            if k < len(labels) and labels[k] == labels[run_start]:
                continue
            label = labels[run_start]
            if label:
                t0 = ts[run_start]
                t1 = ts[k - 1]
                if t1 <= t0:
                    t1 = t0 + eps
                twi_id = _unique_id(safe_id(f"{sample_id}.{label}"), taken)
                twis.append(
                    Twi(id=twi_id, name=label, sample_id=sample_id, t_start=t0, t_end=t1, group_id=0)
                )
            run_start = k
    return sample, twis


def parse_twi_tsv(data: bytes) -> list[Twi]:
    """Parse a standalone TWI TSV.

    Columns: start, end, [name], [gid], [sample_id or "*"], [id]; the long
    forms are what bundles write so ids and per-sample windows survive a
    round trip.  Start must precede end.
    """
    rows = _data_rows(_decode(data))
    twis: list[Twi] = []
    taken: set[str] = set()
    for ordinal, (line_no, fields) in enumerate(rows, start=1):
        if not 2 <= len(fields) <= 6:
            raise MalformedRow(f"expected 2-6 fields, got {len(fields)}", line_no)
        start = _parse_number(fields[0], line_no)
        end = _parse_number(fields[1], line_no)
        if start >= end:
            raise InvertedWindow(f"window [{fmt_num(start)}, {fmt_num(end)}] is not forward", line_no)
        name = fields[2].strip() if len(fields) > 2 and fields[2].strip() else f"twi_{ordinal}"
        gid = 0
        if len(fields) > 3 and fields[3].strip():
            gid_text = fields[3].strip()
            if not re.fullmatch(r"-?\d+", gid_text):
                raise MalformedRow(f"gid must be an integer, got {gid_text!r}", line_no)
            gid = int(gid_text)
        sample_id = fields[4].strip() if len(fields) > 4 and fields[4].strip() else ALL_SAMPLES
        explicit = fields[5].strip() if len(fields) > 5 and fields[5].strip() else None
        twi_id = explicit if explicit is not None else _unique_id(safe_id(name), taken)
        if explicit is not None:
            taken.add(explicit)
        twis.append(Twi(id=twi_id, name=name, sample_id=sample_id, t_start=start, t_end=end, group_id=gid))
    return twis


def parse_groups_json(data: bytes) -> GroupTable:
    try:
        obj = json.loads(_decode(data))
    except json.JSONDecodeError as exc:
        raise MalformedJson(str(exc)) from exc
    except MalformedRow as exc:
        raise MalformedJson(str(exc)) from exc
    if not isinstance(obj, dict):
        raise MalformedJson(f"expected a JSON object, got {type(obj).__name__}")
    tables: dict[str, dict[str, int]] = {}
    for key in ("samples", "aois", "twis"):
        table = obj.get(key, {})
        if not isinstance(table, dict):
            raise MalformedJson(f"{key!r} must map ids to integer gids")
        cleaned: dict[str, int] = {}
        for eid, gid in table.items():
            if isinstance(gid, bool) or not isinstance(gid, int):
                raise MalformedJson(f"{key}[{eid!r}]: gid must be an integer, got {gid!r}")
            cleaned[str(eid)] = gid
        tables[key] = cleaned
    return GroupTable(samples=tables["samples"], aois=tables["aois"], twis=tables["twis"])


def _aoi_from_obj(obj: object, pos: int) -> Aoi:
    if not isinstance(obj, dict):
        raise MalformedJson(f"aoi #{pos}: expected an object, got {type(obj).__name__}")
    try:
        aoi_id = str(obj["id"])
        shape_obj = obj["shape"]
    except KeyError as exc:
        raise MalformedJson(f"aoi #{pos}: missing key {exc}") from None
    if not isinstance(shape_obj, dict) or "type" not in shape_obj:
        raise MalformedJson(f"aoi {aoi_id!r}: shape must be an object with a 'type'")
    kind = shape_obj["type"]
    try:
        if kind == "rect":
            shape: Rect | Polygon = Rect(
                x=float(shape_obj["x"]),
                y=float(shape_obj["y"]),
                w=float(shape_obj["w"]),
                h=float(shape_obj["h"]),
            )
        elif kind == "polygon":
            verts = shape_obj["vertices"]
            if not isinstance(verts, list):
                raise MalformedJson(f"aoi {aoi_id!r}: vertices must be a list")
            shape = Polygon(tuple((float(v[0]), float(v[1])) for v in verts))
        else:
            raise MalformedJson(f"aoi {aoi_id!r}: unknown shape type {kind!r}")
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise MalformedJson(f"aoi {aoi_id!r}: bad shape: {exc}") from exc
    return Aoi(
        id=aoi_id,
        name=str(obj.get("name", aoi_id)),
        shape=shape,
        precedence=int(obj.get("precedence", 0)),
        group_id=int(obj.get("gid", 0)),
    )


def parse_aois_json(data: bytes) -> list[Aoi]:
    """AOI definitions: a JSON list of {id, name, shape, precedence, gid}."""
    try:
        obj = json.loads(_decode(data))
    except json.JSONDecodeError as exc:
        raise MalformedJson(str(exc)) from exc
    except MalformedRow as exc:
        raise MalformedJson(str(exc)) from exc
    if not isinstance(obj, list):
        raise MalformedJson(f"expected a JSON list of AOIs, got {type(obj).__name__}")
    return [_aoi_from_obj(item, pos) for pos, item in enumerate(obj, start=1)]


def shape_to_obj(shape: Rect | Polygon) -> dict[str, object]:
    if isinstance(shape, Rect):
        return {"type": "rect", "x": shape.x, "y": shape.y, "w": shape.w, "h": shape.h}
    return {"type": "polygon", "vertices": [[vx, vy] for vx, vy in shape.vertices]}


def serialize_aois_json(aois: Sequence[Aoi]) -> bytes:
    items = [
        {
            "id": a.id,
            "name": a.name,
            "shape": shape_to_obj(a.shape),
            "precedence": a.precedence,
            "gid": a.group_id,
        }
        for a in sorted(aois, key=lambda a: a.id)
    ]
    return (json.dumps(items, indent=2, sort_keys=True) + "\n").encode("utf-8")


def serialize_gaze_tsv(sample: GazeSample) -> bytes:
    lines = [f"{fmt_num(t)}\t{fmt_num(x)}\t{fmt_num(y)}" for t, x, y in sample.points()]
    return ("\n".join(lines) + "\n").encode("utf-8")


def serialize_twi_tsv(twis: Iterable[Twi]) -> bytes:
    lines = [
        "\t".join(
            (fmt_num(w.t_start), fmt_num(w.t_end), w.name, str(w.group_id), w.sample_id, w.id)
        )
        for w in twis
    ]
    return ("\n".join(lines) + ("\n" if lines else "")).encode("utf-8")


def serialize_groups_json(groups: GroupTable) -> bytes:
    obj: Mapping[str, Mapping[str, int]] = {
        "samples": dict(sorted(groups.samples.items())),
        "aois": dict(sorted(groups.aois.items())),
        "twis": dict(sorted(groups.twis.items())),
    }
    return (json.dumps(obj, indent=2, sort_keys=True) + "\n").encode("utf-8")
