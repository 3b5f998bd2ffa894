"""Batch command line: ingest, metrics, matrix, density, export, serve.

Exit codes: 0 success, 2 validation problems (bad rows, unknown ids,
unsupported combinations), 1 I/O and environment problems (unreadable files,
busy port, unwritable data dir).  Diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import errno
import glob
import json
import os
import socket
import sys
from pathlib import Path

from . import __version__
from .bundle_io import export_bundle, serialize_matrix_tsv
from .density import KdeParams, density_grid, serialize_density_tsv
from .errors import DataDirUnwritable, GazekitError, PortInUse
from .fixations import DetectionParams
from .ingest import (
    IngestOptions,
    parse_aois_json,
    parse_groups_json,
    parse_twi_tsv,
    parse_gaze_tsv,
    safe_id,
    serialize_gaze_tsv,
)
from .matrixops import build_matrix
from .model import Dim, GroupTable, Scope, dataset_validate
from .report import metrics_rows, serialize_metrics_tsv
from .session import MatrixSpec, Session, dataset_bounds, resolve_scope, time_fraction_filter

__all__ = ["main"]


def _dataset_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--gaze", required=True, help="glob of gaze TSV files, one sample per file")
    p.add_argument("--aois", help="AOI definitions JSON")
    p.add_argument("--twis", help="time-window TSV")
    p.add_argument("--groups", help="group assignments JSON")
    p.add_argument("--twi-column", action="store_true", help="gaze rows carry a 4th window-label column")
    p.add_argument("--scope", default="all/all", help="<samples>/<twis>, e.g. group:2/all")
    p.add_argument("--dispersion-threshold", type=float, default=None)
    p.add_argument("--min-duration", type=float, default=None)


def _merged_groups(carried: GroupTable, file_table: GroupTable) -> GroupTable:
    return GroupTable(
        samples={**carried.samples, **file_table.samples},
        aois={**carried.aois, **file_table.aois},
        twis={**carried.twis, **file_table.twis},
    )


def _load_session(args: argparse.Namespace) -> Session:
    paths = sorted(glob.glob(args.gaze))
    if not paths:
        raise GazekitError(f"no files match {args.gaze!r}")
    opts = IngestOptions(twi_column=args.twi_column)
    samples = []
    extra_twis = []
    for path in paths:
        sample, twis = parse_gaze_tsv(Path(path).read_bytes(), sample_id=safe_id(Path(path).stem), opts=opts)
        samples.append(sample)
        extra_twis.extend(twis)

    session = Session().with_samples(samples, extra_twis)
    if args.aois:
        session = session.with_aois(parse_aois_json(Path(args.aois).read_bytes()))
    if args.twis:
        file_twis = parse_twi_tsv(Path(args.twis).read_bytes())
        session = session.with_twis([*session.twis, *file_twis])
    if args.groups:
        file_table = parse_groups_json(Path(args.groups).read_bytes())
        session = session.with_groups(_merged_groups(session.groups, file_table))
    if args.dispersion_threshold is not None or args.min_duration is not None:
        current = session.detection_params
        session = session.with_detection_params(
            DetectionParams(
                dispersion_threshold=args.dispersion_threshold
                if args.dispersion_threshold is not None
                else current.dispersion_threshold,
                min_duration=args.min_duration if args.min_duration is not None else current.min_duration,
            )
        )
    return session.with_scope(Scope.parse(args.scope))


def _cmd_ingest(args: argparse.Namespace) -> int:
    session = _load_session(args)
    report = dataset_validate(session.samples, session.aois, session.twis, session.groups)
    out = Path(args.out)
    (out / "samples").mkdir(parents=True, exist_ok=True)
    for s in session.samples:
        (out / "samples" / f"{s.id}.tsv").write_bytes(serialize_gaze_tsv(s))
        print(f"{s.id}: {s.n_points} points")
    for issue in report.issues:
        print(f"validation: {issue}", file=sys.stderr)
    return 0 if report.ok else 2


def _cmd_metrics(args: argparse.Namespace) -> int:
    session = _load_session(args)
    rows = metrics_rows(session)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    target = out / "metrics.tsv"
    target.write_bytes(serialize_metrics_tsv(rows))
    print(f"wrote {target} ({len(rows)} rows)")
    return 0


def _cmd_matrix(args: argparse.Namespace) -> int:
    session = _load_session(args)
    spec = MatrixSpec(
        id="cli", rows=Dim.parse(args.rows), cols=Dim.parse(args.cols), metric=args.metric, reorder=args.reorder
    )
    matrix = build_matrix(session, spec)
    out = Path(args.out)
    out.write_bytes(serialize_matrix_tsv(matrix))
    if matrix.row_order is not None:
        order_path = out.with_suffix(out.suffix + ".order.json")
        order_path.write_text(
            json.dumps(
                {"rows": list(matrix.row_order), "cols": list(matrix.col_order or [])}, sort_keys=True
            )
            + "\n"
        )
        print(f"wrote {out} and {order_path}")
    else:
        print(f"wrote {out}")
    return 0


def _cmd_density(args: argparse.Namespace) -> int:
    session = _load_session(args)
    base = session.kde_params
    params = KdeParams(
        kernel=args.kernel or base.kernel,
        bandwidth=args.bandwidth if args.bandwidth is not None else base.bandwidth,
        grid_width=args.grid_width if args.grid_width is not None else base.grid_width,
        weighting=args.weighting or base.weighting,
    )
    view = time_fraction_filter(resolve_scope(session), session.time_fraction)
    fixations = [f for e in view.entries for f in e.fixations]
    grid = density_grid(fixations, dataset_bounds(session, 4.0 * params.bandwidth), params)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "grid.tsv").write_bytes(serialize_density_tsv(grid))
    header = {
        "origin": list(grid.origin),
        "cell_size": grid.cell_size,
        "width": grid.width,
        "height": grid.height,
        "total_mass": grid.total_mass,
    }
    (out / "grid.json").write_text(json.dumps(header, sort_keys=True) + "\n")
    print(f"wrote {out / 'grid.tsv'} and {out / 'grid.json'}")
    return 0


def _cmd_export(args: argparse.Namespace) -> int:
    session = _load_session(args)
    out = Path(args.out)
    out.write_bytes(export_bundle(session))
    print(f"wrote {out}")
    return 0


def _probe_port(host: str, port: int) -> int:
    """Reserve-check the port; returns the concrete port (resolves 0)."""
    try:
        with socket.socket(socket.AF_INET, socket.SOCK_STREAM) as s:
            s.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
            s.bind((host, port))
            return s.getsockname()[1]
    except OSError as exc:
        if exc.errno in (errno.EADDRINUSE, errno.EACCES):
            raise PortInUse(f"port {port} is not available: {exc}") from exc
        raise


def _check_data_dir(path: Path) -> None:
    try:
        path.mkdir(parents=True, exist_ok=True)
        probe = path / ".write_probe"
        probe.write_bytes(b"")
        probe.unlink()
    except OSError as exc:
        raise DataDirUnwritable(f"{path}: {exc}") from exc


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    data_dir = Path(args.data_dir)
    _check_data_dir(data_dir)
    port = _probe_port(args.host, args.port)
    print(f"listening on http://{args.host}:{port}", flush=True)
    static = args.static_dir if args.static_dir and Path(args.static_dir).is_dir() else None
    app = create_app(static_dir=static)
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="gazekit", description="gaze analytics toolkit")
    parser.add_argument("--version", action="version", version=f"gazekit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse, validate, and normalize gaze files")
    _dataset_args(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=_cmd_ingest)

    p = sub.add_parser("metrics", help="write the flat metrics table")
    _dataset_args(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=_cmd_metrics)

    p = sub.add_parser("matrix", help="write one relationship matrix as TSV")
    _dataset_args(p)
    p.add_argument("--rows", required=True, help="row dimension, e.g. sample or aoi_group")
    p.add_argument("--cols", required=True, help="column dimension")
    p.add_argument("--metric", required=True, help="metric id, e.g. pct_time or direct")
    p.add_argument("--reorder", default="none", choices=("none", "global"))
    p.add_argument("--out", default="matrix.tsv", help="output TSV path")
    p.set_defaults(fn=_cmd_matrix)

    p = sub.add_parser("density", help="write the attention density grid")
    _dataset_args(p)
    p.add_argument("--bandwidth", type=float, default=None)
    p.add_argument("--kernel", choices=("gaussian", "epanechnikov"), default=None)
    p.add_argument("--weighting", choices=("uniform", "by_duration"), default=None)
    p.add_argument("--grid-width", type=int, default=None)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(fn=_cmd_density)

    p = sub.add_parser("export", help="write the session bundle zip")
    _dataset_args(p)
    p.add_argument("--out", required=True, help="output zip path")
    p.set_defaults(fn=_cmd_export)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=int(os.environ.get("GAZEKIT_PORT", "8000")))
    p.add_argument("--data-dir", default=os.environ.get("GAZEKIT_DATA_DIR", "./gazekit-data"))
    p.add_argument("--static-dir", default=None, help="directory of built UI assets to serve at /")
    p.set_defaults(fn=_cmd_serve)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (PortInUse, DataDirUnwritable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (GazekitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
