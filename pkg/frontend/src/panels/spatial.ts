// Spatial panel: layered 2-D canvas (density, bundled saccades, saccades,
// fixations, AOIs) over the stimulus plane, plus direct AOI editing. Corner
// drags preview locally and commit a PUT on release; the hit-rate readout in
// the header re-reads from the server after the commit, never from the
// preview.

import type { AoiDef, RectShape } from "../api";
import { colorForGroup, DIMMED, HIGHLIGHT, UNGROUPED } from "../colors";
import {
  type Bounds,
  dragRectCorner,
  fitBounds,
  growBounds,
  pointNear,
  rectCorners,
  shapeBounds,
  Transform,
} from "../geometry";
import { fixationKey, saccadeKey } from "../selection";
import type { Store } from "../state";
import { canvasIn, context2d, el, localXY, Panel } from "./base";

const HANDLE_RADIUS = 6;
const FIXATION_RADIUS = 4;

interface AoiHandle {
  aoiId: string;
  corner: number; // rect corner or polygon vertex ordinal
  px: number;
  py: number;
}

interface SpatialModel {
  transform: Transform;
  fixations: { key: string; px: number; py: number; r: number; highlighted: boolean; color: string }[];
  saccades: { key: string; x1: number; y1: number; x2: number; y2: number; highlighted: boolean }[];
  scanpath: [number, number][]; // hovered sample's fixations in time order
  aois: { def: AoiDef; cornersPx: [number, number][]; color: string; preview: boolean }[];
  handles: AoiHandle[];
  anyHighlight: boolean;
}

interface DragState {
  aoi: AoiDef;
  corner: number;
  shape: RectShape | { type: "polygon"; vertices: [number, number][] };
}

export class SpatialPanel extends Panel {
  readonly canvas: HTMLCanvasElement;
  readonly readout: HTMLElement;
  private drag: DragState | null = null;
  model: SpatialModel | null = null;
  showDensity = false;
  showBundles = false;

  constructor(store: Store) {
    super(store, "Spatial", "spatial");
    this.readout = el("span", "readout");
    this.readout.dataset.role = "haar-readout";
    this.root.querySelector(".panel-header")!.insertBefore(this.readout, this.versionBadge);
    this.canvas = canvasIn(this.body, 800, 500);

    this.canvas.addEventListener("mousedown", (ev) => this.onDown(ev));
    this.canvas.addEventListener("mousemove", (ev) => this.onMove(ev));
    this.canvas.addEventListener("mouseup", (ev) => this.onUp(ev));
    this.canvas.addEventListener("mouseleave", () => {
      if (!this.drag) this.store.setHover(null);
    });
  }

  private dataBounds(): Bounds {
    let b: Bounds | null = null;
    const fixations = this.store.fixations()?.samples ?? {};
    for (const list of Object.values(fixations)) {
      for (const f of list) b = growBounds(b, f.cx, f.cy);
    }
    for (const aoi of this.store.summary?.aois ?? []) {
      const sb = shapeBounds(aoi.shape);
      b = growBounds(growBounds(b, sb.x0, sb.y0), sb.x1, sb.y1);
    }
    return b ?? { x0: 0, y0: 0, x1: 1, y1: 1 };
  }

  buildModel(): SpatialModel {
    const transform = fitBounds(this.dataBounds(), this.canvas.width, this.canvas.height);
    const highlights = this.store.highlights();
    const anyHighlight = highlights.fixations.size > 0 || highlights.saccades.size > 0;

    const model: SpatialModel = {
      transform,
      fixations: [],
      saccades: [],
      scanpath: [],
      aois: [],
      handles: [],
      anyHighlight,
    };

    const groups = this.store.summary?.groups.samples ?? {};
    const fixationsBySample = this.store.fixations()?.samples ?? {};
    for (const [sampleId, list] of Object.entries(fixationsBySample)) {
      const color = colorForGroup("sample", groups[sampleId] ?? 0);
      const byIndex = new Map(list.map((f) => [f.index, f]));
      for (const f of list) {
        const [px, py] = transform.toPx(f.cx, f.cy);
        model.fixations.push({
          key: fixationKey(sampleId, f.index),
          px,
          py,
          r: FIXATION_RADIUS + Math.sqrt(f.duration) / 10, // dot area tracks dwell
          highlighted: highlights.fixations.has(fixationKey(sampleId, f.index)),
          color,
        });
      }
      for (const s of this.store.saccades()?.samples?.[sampleId] ?? []) {
        const a = byIndex.get(s.from_fixation);
        const b = byIndex.get(s.to_fixation);
        if (!a || !b) continue;
        const [x1, y1] = transform.toPx(a.cx, a.cy);
        const [x2, y2] = transform.toPx(b.cx, b.cy);
        model.saccades.push({
          key: saccadeKey(sampleId, s.from_fixation),
          x1,
          y1,
          x2,
          y2,
          highlighted: highlights.saccades.has(saccadeKey(sampleId, s.from_fixation)),
        });
      }
      if (highlights.scanpathSample === sampleId) {
        model.scanpath = [...list]
          .sort((a, b) => a.t_start - b.t_start)
          .map((f) => transform.toPx(f.cx, f.cy));
      }
    }

    const aoiGroups = this.store.summary?.groups.aois ?? {};
    for (const def of this.store.summary?.aois ?? []) {
      const previewed = this.drag && this.drag.aoi.id === def.id ? { ...def, shape: this.drag.shape } : def;
      const corners =
        previewed.shape.type === "rect" ? rectCorners(previewed.shape) : previewed.shape.vertices;
      const cornersPx = corners.map(([x, y]) => transform.toPx(x, y));
      model.aois.push({
        def: previewed,
        cornersPx,
        color: colorForGroup("aoi", aoiGroups[def.id] ?? 0),
        preview: this.drag?.aoi.id === def.id,
      });
      cornersPx.forEach(([px, py], corner) => {
        model.handles.push({ aoiId: def.id, corner, px, py });
      });
    }
    return model;
  }

  render(): void {
    const fixations = this.store.fixations();
    this.stampVersion(fixations?.version ?? this.store.version);
    this.showError(this.store.connected ? this.store.lastError : "disconnected");
    this.updateReadout();
    this.model = this.buildModel();
    this.paint(this.model);
  }

  // mean hit-any-AOI rate over the per-sample metric rows
  private updateReadout() {
    const rows = this.store.metrics()?.rows ?? [];
    const values = rows
      .filter((r) => r.metric_id === "haar" && !r.entity.includes(":"))
      .map((r) => r.value);
    if (values.length === 0) {
      this.readout.textContent = "hit rate: -";
      return;
    }
    const mean = values.reduce((a, b) => a + b, 0) / values.length;
    this.readout.textContent = `hit rate: ${mean.toFixed(2)}`;
  }

  private paint(model: SpatialModel) {
    const ctx = context2d(this.canvas);
    if (!ctx) return;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);

    if (this.showDensity) this.paintDensity(ctx, model.transform);

    if (this.showBundles) {
      ctx.strokeStyle = "rgba(80, 90, 110, 0.5)";
      ctx.lineWidth = 1.5;
      for (const line of this.store.bundles()?.polylines ?? []) {
        ctx.beginPath();
        line.forEach(([x, y], i) => {
          const [px, py] = model.transform.toPx(x, y);
          if (i === 0) ctx.moveTo(px, py);
          else ctx.lineTo(px, py);
        });
        ctx.stroke();
      }
    }

    for (const s of model.saccades) {
      ctx.strokeStyle = s.highlighted ? HIGHLIGHT : model.anyHighlight ? DIMMED : "rgba(90,98,110,0.6)";
      ctx.lineWidth = s.highlighted ? 2.5 : 1;
      ctx.beginPath();
      ctx.moveTo(s.x1, s.y1);
      ctx.lineTo(s.x2, s.y2);
      ctx.stroke();
    }

    for (const f of model.fixations) {
      ctx.fillStyle = f.highlighted ? HIGHLIGHT : model.anyHighlight ? DIMMED : f.color;
      ctx.beginPath();
      ctx.arc(f.px, f.py, f.r, 0, Math.PI * 2);
      ctx.fill();
    }

    if (model.scanpath.length > 1) {
      ctx.strokeStyle = "#111";
      ctx.lineWidth = 1.5;
      ctx.setLineDash([4, 3]);
      ctx.beginPath();
      model.scanpath.forEach(([px, py], i) => (i === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py)));
      ctx.stroke();
      ctx.setLineDash([]);
    }

    for (const aoi of model.aois) {
      ctx.strokeStyle = aoi.color === UNGROUPED ? "#787f85" : aoi.color;
      ctx.lineWidth = aoi.preview ? 2.5 : 1.5;
      ctx.beginPath();
      aoi.cornersPx.forEach(([px, py], i) => (i === 0 ? ctx.moveTo(px, py) : ctx.lineTo(px, py)));
      ctx.closePath();
      ctx.stroke();
      const [lx, ly] = aoi.cornersPx[0]!;
      ctx.fillStyle = ctx.strokeStyle;
      ctx.font = "11px sans-serif";
      ctx.fillText(aoi.def.name, lx + 3, ly + 12);
    }

    ctx.fillStyle = "#333";
    for (const h of model.handles) {
      ctx.fillRect(h.px - 3, h.py - 3, 6, 6);
    }
  }

  private paintDensity(ctx: CanvasRenderingContext2D, transform: Transform) {
    const grid = this.store.density();
    if (!grid) return;
    let peak = 0;
    for (const row of grid.mass) for (const v of row) peak = Math.max(peak, v);
    if (peak <= 0) return;
    for (let gy = 0; gy < grid.height; gy++) {
      for (let gx = 0; gx < grid.width; gx++) {
        const v = grid.mass[gy]![gx]!;
        if (v <= 0) continue;
        const [px, py] = transform.toPx(
          grid.origin[0] + gx * grid.cell_size,
          grid.origin[1] + gy * grid.cell_size,
        );
        const side = grid.cell_size * transform.scale;
        ctx.fillStyle = `rgba(214, 69, 50, ${(0.65 * v) / peak})`;
        ctx.fillRect(px, py, side + 0.5, side + 0.5);
      }
    }
  }

  // -- AOI editing ----------------------------------------------------------

  handleAt(px: number, py: number): AoiHandle | null {
    for (const h of this.model?.handles ?? []) {
      if (pointNear(px, py, h.px, h.py, HANDLE_RADIUS)) return h;
    }
    return null;
  }

  private onDown(ev: MouseEvent) {
    const [px, py] = localXY(this.canvas, ev);
    const handle = this.handleAt(px, py);
    if (!handle) return;
    const aoi = this.store.summary?.aois.find((a) => a.id === handle.aoiId);
    if (!aoi) return;
    this.drag = { aoi, corner: handle.corner, shape: structuredClone(aoi.shape) };
    ev.preventDefault();
  }

  private onMove(ev: MouseEvent) {
    if (!this.drag || !this.model) return;
    const [px, py] = localXY(this.canvas, ev);
    const [x, y] = this.model.transform.toData(px, py);
    if (this.drag.shape.type === "rect") {
      this.drag.shape = dragRectCorner(this.drag.shape, this.drag.corner, x, y);
    } else {
      const vertices = this.drag.shape.vertices.map((v, i): [number, number] =>
        i === this.drag!.corner ? [x, y] : v,
      );
      this.drag.shape = { type: "polygon", vertices };
    }
    this.render(); // local preview only; nothing committed yet
  }

  private onUp(_ev: MouseEvent) {
    if (!this.drag) return;
    const { aoi, shape } = this.drag;
    this.drag = null;
    const aois = (this.store.summary?.aois ?? []).map((a) => (a.id === aoi.id ? { ...a, shape } : a));
    void this.store.mutate((api, sid) => api.putAois(sid, aois));
  }
}
