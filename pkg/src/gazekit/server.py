"""HTTP front end: session lifecycle, uploads, and the per-view queries.

Every GET is a pure function of (session version, path, query string); the
store memoizes the serialized bytes under that key, so replaying a query at
a fixed version returns byte-identical bodies.  Mutations take the session's
writer lock, swap in a new immutable snapshot, and answer with the new
version number.
"""

from __future__ import annotations

import json
import threading
import uuid
import warnings
from pathlib import Path
from typing import Callable, Mapping

from fastapi import FastAPI, File, Form, Request, Response, UploadFile
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import __version__, demo
from .aoi import TransitionKind, focus_context, timeline_segments, transition_events
from .bundle_io import export_bundle, import_bundle
from .bundling import BundleParams, bundle_saccades
from .density import KdeParams, density_grid
from .errors import GazekitError, MissingFile, UnknownFocusAoi, UnknownId, UnknownScopeTarget
from .fixations import DetectionParams
from .ingest import (
    IngestOptions,
    parse_aois_json,
    parse_gaze_tsv,
    parse_groups_json,
    safe_id,
    shape_to_obj,
)
from .matrixops import build_matrix
from .model import Dim, Scope, Twi
from .report import metrics_rows
from .session import MatrixSpec, Session, dataset_bounds, resolve_scope, time_fraction_filter
from .similarity import NwScoring

__all__ = ["SessionStore", "create_app"]

_NOT_FOUND = (UnknownId, UnknownScopeTarget, UnknownFocusAoi, MissingFile)


def _dumps(payload: object) -> bytes:
    # Canonical bytes: sorted keys, no whitespace, shortest-round-trip floats.
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), allow_nan=False).encode(
        "utf-8"
    )


class _Entry:
    __slots__ = ("session", "lock", "cache")

    def __init__(self, session: Session):
        self.session = session
        self.lock = threading.Lock()
        # one generation of response bytes, keyed by path?query
        self.cache: tuple[int, dict[str, tuple[str, bytes]]] = (session.dataset_version, {})


class SessionStore:
    """In-memory sessions; independent locks so sessions never cross-block."""

    def __init__(self) -> None:
        self._entries: dict[str, _Entry] = {}
        self._lock = threading.Lock()

    def create(self, session: Session) -> str:
        sid = uuid.uuid4().hex[:12]
        with self._lock:
            self._entries[sid] = _Entry(session)
        return sid

    def entry(self, sid: str) -> _Entry:
        with self._lock:
            entry = self._entries.get(sid)
        if entry is None:
            raise UnknownId(f"unknown session {sid!r}")
        return entry

    def get(self, sid: str) -> Session:
        return self.entry(sid).session

    def mutate(self, sid: str, fn: Callable[[Session], Session]) -> Session:
        entry = self.entry(sid)
        with entry.lock:
            entry.session = fn(entry.session)
            return entry.session

    def cached(self, sid: str, key: str, compute: Callable[[Session], tuple[str, bytes]]) -> Response:
        entry = self.entry(sid)
        session = entry.session
        version, responses = entry.cache
        if version != session.dataset_version:
            responses = {}
            entry.cache = (session.dataset_version, responses)
        hit = responses.get(key)
        if hit is None:
            hit = compute(session)
            responses[key] = hit
        media_type, body = hit
        return Response(content=body, media_type=media_type)


def _fraction_view(session: Session):
    return time_fraction_filter(resolve_scope(session), session.time_fraction)


def _fixation_obj(f) -> dict[str, object]:
    return {
        "index": f.index,
        "cx": f.cx,
        "cy": f.cy,
        "t_start": f.t_start,
        "t_end": f.t_end,
        "duration": f.duration,
    }


def _params_obj(session: Session) -> dict[str, object]:
    d, k, b, n = session.detection_params, session.kde_params, session.bundle_params, session.nw_scoring
    return {
        "detection": {"dispersion_threshold": d.dispersion_threshold, "min_duration": d.min_duration},
        "kde": {"kernel": k.kernel, "bandwidth": k.bandwidth, "grid_width": k.grid_width, "weighting": k.weighting},
        "bundle": {
            "iterations": b.iterations,
            "kernel_bandwidth": b.kernel_bandwidth,
            "smoothing": b.smoothing,
            "direction_split_deg": b.direction_split_deg,
        },
        "nw": {"match": n.match, "mismatch": n.mismatch, "gap": n.gap},
        "time_fraction": session.time_fraction,
    }


def _twi_from_obj(obj: Mapping[str, object], ordinal: int) -> Twi:
    try:
        t_start = float(obj["t_start"])  # type: ignore[arg-type]
        t_end = float(obj["t_end"])  # type: ignore[arg-type]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"twi #{ordinal}: needs numeric t_start and t_end") from exc
    name = str(obj.get("name") or f"twi_{ordinal}")
    twi_id = str(obj.get("id") or safe_id(f"{name}_{ordinal}"))
    return Twi(
        id=twi_id,
        name=name,
        sample_id=str(obj.get("sample_id") or "*"),
        t_start=t_start,
        t_end=t_end,
        group_id=int(obj.get("gid", 0)),  # type: ignore[arg-type]
    )


def create_app(store: SessionStore | None = None, static_dir: str | Path | None = None) -> FastAPI:
    store = store if store is not None else SessionStore()
    app = FastAPI(title="gazekit", version=__version__)
    app.state.store = store

    @app.exception_handler(GazekitError)
    async def _gazekit_error(_request: Request, exc: GazekitError) -> JSONResponse:
        status = 404 if isinstance(exc, _NOT_FOUND) else 400
        return JSONResponse(status_code=status, content={"error": type(exc).__name__, "detail": str(exc)})

    @app.exception_handler(ValueError)
    async def _value_error(_request: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse(status_code=400, content={"error": "ValueError", "detail": str(exc)})

    def json_response(payload: object) -> Response:
        return Response(content=_dumps(payload), media_type="application/json")

    @app.get("/api/health")
    def health() -> Response:
        return json_response({"status": "ok", "version": __version__})

    @app.post("/api/sessions")
    async def create_session(request: Request) -> Response:
        body = await request.body()
        session = Session()
        if body:
            obj = json.loads(body.decode("utf-8"))
            which = obj.get("demo") if isinstance(obj, dict) else None
            if which == "haar":
                session = demo.haar_session(int(obj.get("stage", 0)))
            elif which == "linking":
                session = demo.linking_session()
            elif which is not None:
                raise ValueError(f"unknown demo dataset {which!r}")
        sid = store.create(session)
        return json_response({"session_id": sid, "version": session.dataset_version})

    @app.get("/api/sessions/{sid}")
    def session_summary(sid: str) -> Response:
        def compute(session: Session) -> tuple[str, bytes]:
            groups = session.groups
            payload = {
                "session_id": sid,
                "version": session.dataset_version,
                "sample_ids": [s.id for s in session.samples],
                "aois": [
                    {
                        "id": a.id,
                        "name": a.name,
                        "precedence": a.precedence,
                        "gid": groups.gid_of(Dim.AOI, a.id),
                        "shape": shape_to_obj(a.shape),
                    }
                    for a in session.aois
                ],
                "twis": [
                    {
                        "id": w.id,
                        "name": w.name,
                        "sample_id": w.sample_id,
                        "t_start": w.t_start,
                        "t_end": w.t_end,
                        "gid": groups.gid_of(Dim.TWI, w.id),
                    }
                    for w in session.twis
                ],
                "groups": {
                    "samples": dict(sorted(groups.samples.items())),
                    "aois": dict(sorted(groups.aois.items())),
                    "twis": dict(sorted(groups.twis.items())),
                },
                "scope": str(session.scope),
                "params": _params_obj(session),
                "matrices": [
                    {"id": m.id, "rows": m.rows.value, "cols": m.cols.value, "metric": m.metric, "reorder": m.reorder}
                    for m in session.matrix_specs
                ],
            }
            return "application/json", _dumps(payload)

        return store.cached(sid, "summary", compute)

    # -- mutations ---------------------------------------------------------

    def version_response(session: Session) -> Response:
        return json_response({"version": session.dataset_version})

    @app.post("/api/sessions/{sid}/samples")
    async def upload_samples(
        sid: str, files: list[UploadFile] = File(...), twi_column: str = Form("0")
    ) -> Response:
        with_twis = twi_column.strip().lower() in ("1", "true", "yes", "on")
        parsed = []
        for upload in files:
            raw = await upload.read()
            stem = Path(upload.filename or "sample").stem
            sample, twis = parse_gaze_tsv(
                raw, sample_id=safe_id(stem), opts=IngestOptions(twi_column=with_twis)
            )
            parsed.append((sample, twis))

        session = store.mutate(
            sid,
            lambda s: s.with_samples(
                [sample for sample, _ in parsed],
                [w for _, twis in parsed for w in twis],
            ),
        )
        return json_response(
            {"version": session.dataset_version, "sample_ids": [sample.id for sample, _ in parsed]}
        )

    @app.put("/api/sessions/{sid}/aois")
    async def put_aois(sid: str, request: Request) -> Response:
        aois = parse_aois_json(await request.body())
        return version_response(store.mutate(sid, lambda s: s.with_aois(aois)))

    @app.put("/api/sessions/{sid}/twis")
    async def put_twis(sid: str, request: Request) -> Response:
        obj = json.loads((await request.body()).decode("utf-8"))
        if not isinstance(obj, list):
            raise ValueError("expected a JSON list of time windows")
        twis = [_twi_from_obj(item, pos) for pos, item in enumerate(obj, start=1)]
        return version_response(store.mutate(sid, lambda s: s.with_twis(twis)))

    @app.put("/api/sessions/{sid}/groups")
    async def put_groups(sid: str, request: Request) -> Response:
        groups = parse_groups_json(await request.body())
        return version_response(store.mutate(sid, lambda s: s.with_groups(groups)))

    @app.put("/api/sessions/{sid}/params")
    async def put_params(sid: str, request: Request) -> Response:
        obj = json.loads((await request.body()).decode("utf-8"))
        if not isinstance(obj, dict):
            raise ValueError("expected a JSON object of parameter updates")

        def apply(s: Session) -> Session:
            if "detection" in obj:
                s = s.with_detection_params(DetectionParams(**obj["detection"]))
            if "kde" in obj:
                s = s.with_kde_params(KdeParams(**obj["kde"]))
            if "bundle" in obj:
                s = s.with_bundle_params(BundleParams(**obj["bundle"]))
            if "nw" in obj:
                s = s.with_nw_scoring(NwScoring(**obj["nw"]))
            if "time_fraction" in obj:
                s = s.with_time_fraction(float(obj["time_fraction"]))
            return s

        return version_response(store.mutate(sid, apply))

    @app.put("/api/sessions/{sid}/scope")
    async def put_scope(sid: str, request: Request) -> Response:
        obj = json.loads((await request.body()).decode("utf-8"))
        if not isinstance(obj, dict) or "scope" not in obj:
            raise ValueError('expected {"scope": "<samples>/<twis>"}')
        scope = Scope.parse(str(obj["scope"]))
        return version_response(store.mutate(sid, lambda s: s.with_scope(scope)))

    @app.put("/api/sessions/{sid}/matrices")
    async def put_matrices(sid: str, request: Request) -> Response:
        obj = json.loads((await request.body()).decode("utf-8"))
        if not isinstance(obj, list):
            raise ValueError("expected a JSON list of matrix specs")
        specs = [
            MatrixSpec(
                id=str(m["id"]),
                rows=Dim.parse(str(m["rows"])),
                cols=Dim.parse(str(m["cols"])),
                metric=str(m["metric"]),
                reorder=str(m.get("reorder", "none")),
            )
            for m in obj
        ]
        return version_response(store.mutate(sid, lambda s: s.with_matrix_specs(specs)))

    @app.post("/api/sessions/{sid}/import")
    async def post_import(sid: str, request: Request) -> Response:
        raw = await request.body()
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            imported = import_bundle(raw)
        store.mutate(sid, lambda _s: imported)
        return json_response(
            {
                "version": imported.dataset_version,
                "warnings": [str(w.message) for w in caught],
            }
        )

    # -- queries -----------------------------------------------------------

    def query_key(request: Request) -> str:
        url = request.url
        return f"{url.path}?{url.query}" if url.query else url.path

    @app.get("/api/sessions/{sid}/fixations")
    def get_fixations(sid: str, request: Request) -> Response:
        def compute(session: Session) -> tuple[str, bytes]:
            view = _fraction_view(session)
            payload = {
                "version": session.dataset_version,
                "samples": {e.sample_id: [_fixation_obj(f) for f in e.fixations] for e in view.entries},
            }
            return "application/json", _dumps(payload)

        return store.cached(sid, query_key(request), compute)

    @app.get("/api/sessions/{sid}/saccades")
    def get_saccades(sid: str, request: Request) -> Response:
        def compute(session: Session) -> tuple[str, bytes]:
            view = _fraction_view(session)
            payload = {
                "version": session.dataset_version,
                "samples": {
                    e.sample_id: [
                        {
                            "from_fixation": s.from_fixation,
                            "to_fixation": s.to_fixation,
                            "length": s.length,
                            "duration": s.duration,
                            "angle": s.angle,
                        }
                        for s in e.saccades
                    ]
                    for e in view.entries
                },
            }
            return "application/json", _dumps(payload)

        return store.cached(sid, query_key(request), compute)

    @app.get("/api/sessions/{sid}/labels")
    def get_labels(sid: str, request: Request) -> Response:
        def compute(session: Session) -> tuple[str, bytes]:
            view = _fraction_view(session)
            payload = {
                "version": session.dataset_version,
                "samples": {e.sample_id: [lf.aoi_id for lf in e.labels] for e in view.entries},
            }
            return "application/json", _dumps(payload)

        return store.cached(sid, query_key(request), compute)

    @app.get("/api/sessions/{sid}/metrics")
    def get_metrics(sid: str, request: Request) -> Response:
        def compute(session: Session) -> tuple[str, bytes]:
            payload = {"version": session.dataset_version, "rows": metrics_rows(session)}
            return "application/json", _dumps(payload)

        return store.cached(sid, query_key(request), compute)

    @app.get("/api/sessions/{sid}/matrix")
    def get_matrix(
        sid: str, request: Request, rows: str, cols: str, metric: str, reorder: str = "none"
    ) -> Response:
        def compute(session: Session) -> tuple[str, bytes]:
            spec = MatrixSpec(id="adhoc", rows=Dim.parse(rows), cols=Dim.parse(cols), metric=metric, reorder=reorder)
            matrix = build_matrix(session, spec)
            payload = {
                "version": session.dataset_version,
                "row_dim": matrix.row_dim.value,
                "col_dim": matrix.col_dim.value,
                "metric": matrix.metric_id,
                "row_ids": list(matrix.row_ids),
                "col_ids": list(matrix.col_ids),
                "values": [[float(v) for v in row] for row in matrix.values],
                "symmetric": matrix.symmetric,
                "row_order": list(matrix.row_order) if matrix.row_order is not None else None,
                "col_order": list(matrix.col_order) if matrix.col_order is not None else None,
            }
            return "application/json", _dumps(payload)

        return store.cached(sid, query_key(request), compute)

    @app.get("/api/sessions/{sid}/density")
    def get_density(
        sid: str,
        request: Request,
        bandwidth: float | None = None,
        kernel: str | None = None,
        weighting: str | None = None,
        grid_width: int | None = None,
    ) -> Response:
        def compute(session: Session) -> tuple[str, bytes]:
            params = session.kde_params
            params = KdeParams(
                kernel=kernel if kernel is not None else params.kernel,
                bandwidth=bandwidth if bandwidth is not None else params.bandwidth,
                grid_width=grid_width if grid_width is not None else params.grid_width,
                weighting=weighting if weighting is not None else params.weighting,
            )
            view = _fraction_view(session)
            fixations = [f for e in view.entries for f in e.fixations]
            bounds = dataset_bounds(session, 4.0 * params.bandwidth)
            grid = density_grid(fixations, bounds, params)
            payload = {
                "version": session.dataset_version,
                "origin": list(grid.origin),
                "cell_size": grid.cell_size,
                "width": grid.width,
                "height": grid.height,
                "mass": [[float(v) for v in row] for row in grid.mass],
            }
            return "application/json", _dumps(payload)

        return store.cached(sid, query_key(request), compute)

    @app.get("/api/sessions/{sid}/bundles")
    def get_bundles(sid: str, request: Request) -> Response:
        def compute(session: Session) -> tuple[str, bytes]:
            view = _fraction_view(session)
            segments = []
            for e in view.entries:
                by_index = {f.index: f for f in e.fixations}
                for s in e.saccades:
                    a = by_index[s.from_fixation]
                    b = by_index[s.to_fixation]
                    segments.append(((a.cx, a.cy), (b.cx, b.cy)))
            polylines = bundle_saccades(segments, session.bundle_params)
            payload = {
                "version": session.dataset_version,
                "polylines": [[[float(x), float(y)] for x, y in line] for line in polylines],
            }
            return "application/json", _dumps(payload)

        return store.cached(sid, query_key(request), compute)

    @app.get("/api/sessions/{sid}/timeline")
    def get_timeline(sid: str, request: Request) -> Response:
        def compute(session: Session) -> tuple[str, bytes]:
            view = _fraction_view(session)
            groups = session.groups
            samples = {}
            for e in view.entries:
                rows = []
                for t0, t1, aoi_id in timeline_segments(e.labels):
                    gid = groups.gid_of(Dim.AOI, aoi_id) if aoi_id is not None else 0
                    rows.append([t0, t1, aoi_id, gid])
                samples[e.sample_id] = rows
            payload = {"version": session.dataset_version, "samples": samples}
            return "application/json", _dumps(payload)

        return store.cached(sid, query_key(request), compute)

    @app.get("/api/sessions/{sid}/focus-context")
    def get_focus_context(sid: str, request: Request, aoi: str) -> Response:
        def compute(session: Session) -> tuple[str, bytes]:
            view = _fraction_view(session)
            aoi_ids = [a.id for a in session.aois]
            payload = {
                "version": session.dataset_version,
                "samples": {
                    e.sample_id: [c.value for c in focus_context(e.labels, aoi, aoi_ids)]
                    for e in view.entries
                },
            }
            return "application/json", _dumps(payload)

        return store.cached(sid, query_key(request), compute)

    @app.get("/api/sessions/{sid}/transition-events")
    def get_transition_events(
        sid: str, request: Request, kind: str = "direct", alphabet: str = "aoi", focus: str | None = None
    ) -> Response:
        def compute(session: Session) -> tuple[str, bytes]:
            # Unfractioned on purpose: these spans are the provenance of the
            # transition-matrix counts, which also ignore the animation.
            view = resolve_scope(session)
            samples = {}
            for e in view.entries:
                events = transition_events(
                    e.labels,
                    TransitionKind(kind),
                    session.aois,
                    alphabet=alphabet,  # type: ignore[arg-type]
                    groups=session.groups,
                    focus=focus,
                )
                samples[e.sample_id] = {
                    f"{u}->{v}": [[lo, hi] for lo, hi in spans] for (u, v), spans in events.items()
                }
            payload = {"version": session.dataset_version, "samples": samples}
            return "application/json", _dumps(payload)

        return store.cached(sid, query_key(request), compute)

    @app.get("/api/sessions/{sid}/export")
    def get_export(sid: str, request: Request) -> Response:
        def compute(session: Session) -> tuple[str, bytes]:
            return "application/zip", export_bundle(session)

        return store.cached(sid, query_key(request), compute)

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")

    return app
