// Timeline panel: compact scarf strips per sample, AOI rows for the focused
// sample (row order follows the matrix AOI order), highlight marks directly
// below the strips, an editable TWI track, and the time-animate slider that
// drives the session's time_fraction.

import type { TimelineSegment, TwiDef } from "../api";
import { colorForGroup, HIGHLIGHT, UNGROUPED } from "../colors";
import { fixationKey } from "../selection";
import type { Store } from "../state";
import { canvasIn, context2d, el, localXY, Panel } from "./base";

const STRIP_H = 16;
const AOI_ROW_H = 18;
const MARKS_H = 10;
const TWI_H = 22;
const LEFT_GUTTER = 86;
const MIN_TWI_MS = 1;

interface Segment {
  x: number;
  w: number;
  color: string;
  aoiId: string | null;
}

interface TimelineModel {
  t0: number;
  t1: number;
  xOf(t: number): number;
  tOf(x: number): number;
  strips: { sampleId: string; y: number; segments: Segment[] }[];
  marks: { x: number; y: number; sampleId: string }[];
  aoiRows: { aoiId: string; y: number; color: string; segments: Segment[] }[];
  twiY: number;
  twiBoxes: { twi: TwiDef; x: number; w: number }[];
}

type TwiDrag =
  | { mode: "create"; tAnchor: number; tNow: number }
  | { mode: "move"; twi: TwiDef; grabOffset: number; tNow: number };

export class TimelinePanel extends Panel {
  readonly canvas: HTMLCanvasElement;
  readonly slider: HTMLInputElement;
  model: TimelineModel | null = null;
  private drag: TwiDrag | null = null;

  constructor(store: Store) {
    super(store, "Timeline", "timeline");
    this.canvas = canvasIn(this.body, 900, 240);

    const sliderRow = el("div", "slider-row");
    sliderRow.appendChild(el("span", "control-label", "time"));
    this.slider = el("input") as HTMLInputElement;
    this.slider.type = "range";
    this.slider.min = "0";
    this.slider.max = "1";
    this.slider.step = "0.01";
    this.slider.value = "1";
    this.slider.dataset.role = "time-fraction";
    sliderRow.appendChild(this.slider);
    this.body.appendChild(sliderRow);

    this.slider.addEventListener("input", () => {
      const fraction = Number(this.slider.value);
      this.store.debounce("time_fraction", 150, () => {
        void this.store.mutate((api, sid) => api.putParams(sid, { time_fraction: fraction }));
      });
    });

    this.canvas.addEventListener("mousemove", (ev) => this.onMove(ev));
    this.canvas.addEventListener("mousedown", (ev) => this.onDown(ev));
    this.canvas.addEventListener("mouseup", (ev) => this.onUp(ev));
    this.canvas.addEventListener("mouseleave", () => {
      if (!this.drag) this.store.setHover(null);
    });
  }

  buildModel(): TimelineModel | null {
    const timeline = this.store.timeline();
    const summary = this.store.summary;
    if (!timeline || !summary) return null;

    let t0 = Infinity;
    let t1 = -Infinity;
    for (const segments of Object.values(timeline.samples)) {
      for (const [a, b] of segments) {
        t0 = Math.min(t0, a);
        t1 = Math.max(t1, b);
      }
    }
    for (const w of summary.twis) {
      t0 = Math.min(t0, w.t_start);
      t1 = Math.max(t1, w.t_end);
    }
    if (!Number.isFinite(t0)) {
      t0 = 0;
      t1 = 1;
    }
    if (t1 <= t0) t1 = t0 + 1;

    const plotW = this.canvas.width - LEFT_GUTTER - 12;
    const xOf = (t: number) => LEFT_GUTTER + ((t - t0) / (t1 - t0)) * plotW;
    const tOf = (x: number) => t0 + ((x - LEFT_GUTTER) / plotW) * (t1 - t0);

    const aoiGroups = summary.groups.aois;
    const segColor = (aoiId: string | null) =>
      aoiId === null ? "#dcdfe3" : colorForGroup("aoi", aoiGroups[aoiId] ?? 0);

    const model: TimelineModel = {
      t0,
      t1,
      xOf,
      tOf,
      strips: [],
      marks: [],
      aoiRows: [],
      twiY: 0,
      twiBoxes: [],
    };

    const toSegments = (rows: TimelineSegment[], keep?: string): Segment[] => {
      const out: Segment[] = [];
      for (const [a, b, aoiId] of rows) {
        if (keep !== undefined && aoiId !== keep) continue;
        out.push({ x: xOf(a), w: Math.max(xOf(b) - xOf(a), 1), color: segColor(aoiId), aoiId });
      }
      return out;
    };

    let y = 6;
    for (const sampleId of summary.sample_ids) {
      model.strips.push({ sampleId, y, segments: toSegments(timeline.samples[sampleId] ?? []) });
      y += STRIP_H + 2;
    }

    // highlighted fixation onsets, directly below the strips
    const marksY = y;
    const highlights = this.store.highlights();
    const fixations = this.store.fixations()?.samples ?? {};
    for (const [sampleId, list] of Object.entries(fixations)) {
      for (const f of list) {
        if (highlights.fixations.has(fixationKey(sampleId, f.index))) {
          model.marks.push({ x: xOf(f.t_start), y: marksY, sampleId });
        }
      }
    }
    y += MARKS_H + 4;

    const focused = this.store.focusedSample;
    const focusedRows = focused ? (timeline.samples[focused] ?? []) : [];
    for (const aoiId of this.store.aoiOrder) {
      model.aoiRows.push({
        aoiId,
        y,
        color: segColor(aoiId),
        segments: toSegments(focusedRows, aoiId),
      });
      y += AOI_ROW_H;
    }

    model.twiY = y + 6;
    for (const twi of summary.twis) {
      model.twiBoxes.push({
        twi,
        x: xOf(twi.t_start),
        w: Math.max(xOf(twi.t_end) - xOf(twi.t_start), 2),
      });
    }
    return model;
  }

  // scarf AOI row order, the half of the synchronization invariant this
  // panel owns
  aoiRowOrder(): string[] {
    return (this.model?.aoiRows ?? []).map((r) => r.aoiId);
  }

  render(): void {
    const timeline = this.store.timeline();
    this.stampVersion(timeline?.version ?? this.store.version);
    this.showError(this.store.connected ? this.store.lastError : "disconnected");
    const fraction = this.store.summary?.params.time_fraction;
    if (fraction !== undefined && document.activeElement !== this.slider) {
      this.slider.value = String(fraction);
    }
    this.model = this.buildModel();
    if (this.model) this.paint(this.model);
  }

  private paint(model: TimelineModel) {
    const ctx = context2d(this.canvas);
    if (!ctx) return;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    ctx.font = "11px sans-serif";

    for (const strip of model.strips) {
      ctx.fillStyle = strip.sampleId === this.store.focusedSample ? "#111" : "#666";
      ctx.fillText(strip.sampleId.slice(0, 12), 4, strip.y + STRIP_H - 4);
      for (const seg of strip.segments) {
        ctx.fillStyle = seg.color;
        ctx.fillRect(seg.x, strip.y, seg.w, STRIP_H);
      }
    }

    ctx.fillStyle = HIGHLIGHT;
    for (const mark of model.marks) {
      ctx.beginPath();
      ctx.moveTo(mark.x, mark.y);
      ctx.lineTo(mark.x - 4, mark.y + MARKS_H - 2);
      ctx.lineTo(mark.x + 4, mark.y + MARKS_H - 2);
      ctx.closePath();
      ctx.fill();
    }

    for (const row of model.aoiRows) {
      ctx.fillStyle = row.color === UNGROUPED ? "#787f85" : row.color;
      ctx.fillText(row.aoiId.slice(0, 12), 4, row.y + AOI_ROW_H - 5);
      for (const seg of row.segments) {
        ctx.fillStyle = row.color;
        ctx.fillRect(seg.x, row.y + 2, seg.w, AOI_ROW_H - 5);
      }
      ctx.strokeStyle = "#eceef1";
      ctx.strokeRect(LEFT_GUTTER, row.y + 2, this.canvas.width - LEFT_GUTTER - 12, AOI_ROW_H - 5);
    }

    ctx.fillStyle = "#666";
    ctx.fillText("windows", 4, model.twiY + TWI_H - 6);
    for (const box of model.twiBoxes) {
      ctx.fillStyle = "rgba(63, 155, 79, 0.35)";
      ctx.fillRect(box.x, model.twiY, box.w, TWI_H - 4);
      ctx.strokeStyle = colorForGroup("twi", box.twi.gid);
      ctx.strokeRect(box.x, model.twiY, box.w, TWI_H - 4);
    }
    if (this.drag) {
      const [a, b] = this.dragRange();
      ctx.fillStyle = "rgba(63, 155, 79, 0.2)";
      ctx.fillRect(model.xOf(a), model.twiY, Math.max(model.xOf(b) - model.xOf(a), 2), TWI_H - 4);
    }
  }

  private dragRange(): [number, number] {
    const d = this.drag!;
    if (d.mode === "create") {
      let [a, b] = [Math.min(d.tAnchor, d.tNow), Math.max(d.tAnchor, d.tNow)];
      if (b - a < MIN_TWI_MS) b = a + MIN_TWI_MS; // inverted or zero drags snap to minimum width
      return [a, b];
    }
    const width = d.twi.t_end - d.twi.t_start;
    const start = d.tNow - d.grabOffset;
    return [start, start + width];
  }

  stripAt(py: number): string | null {
    for (const strip of this.model?.strips ?? []) {
      if (py >= strip.y && py <= strip.y + STRIP_H) return strip.sampleId;
    }
    return null;
  }

  twiBoxAt(px: number, py: number): TwiDef | null {
    const model = this.model;
    if (!model || py < model.twiY || py > model.twiY + TWI_H) return null;
    for (const box of model.twiBoxes) {
      if (px >= box.x && px <= box.x + box.w) return box.twi;
    }
    return null;
  }

  private onMove(ev: MouseEvent) {
    const model = this.model;
    if (!model) return;
    const [px, py] = localXY(this.canvas, ev);
    if (this.drag) {
      this.drag.tNow = model.tOf(px);
      this.render(); // preview only
      return;
    }
    const sampleId = this.stripAt(py);
    if (sampleId) {
      this.store.setHover({ sampleId, t: model.tOf(px) });
    } else if (this.store.hover) {
      this.store.setHover(null);
    }
  }

  private onDown(ev: MouseEvent) {
    const model = this.model;
    if (!model) return;
    const [px, py] = localXY(this.canvas, ev);
    const sampleId = this.stripAt(py);
    if (sampleId && px < LEFT_GUTTER) {
      this.store.focusedSample = sampleId;
      this.render();
      return;
    }
    if (py >= model.twiY && py <= model.twiY + TWI_H) {
      const hit = this.twiBoxAt(px, py);
      const t = model.tOf(px);
      this.drag = hit
        ? { mode: "move", twi: hit, grabOffset: t - hit.t_start, tNow: t }
        : { mode: "create", tAnchor: t, tNow: t };
      ev.preventDefault();
    }
  }

  private onUp(_ev: MouseEvent) {
    if (!this.drag || !this.model) return;
    const [a, b] = this.dragRange();
    const drag = this.drag;
    this.drag = null;
    const existing = this.store.summary?.twis ?? [];
    let next: Omit<TwiDef, "gid">[];
    if (drag.mode === "create") {
      const ordinal = existing.length + 1;
      next = [
        ...existing,
        { id: `w${ordinal}`, name: `window ${ordinal}`, sample_id: "*", t_start: a, t_end: b },
      ];
    } else {
      next = existing.map((w) =>
        w.id === drag.twi.id ? { ...w, t_start: a, t_end: b } : w,
      );
    }
    void this.store.mutate((api, sid) => api.putTwis(sid, next));
  }
}
