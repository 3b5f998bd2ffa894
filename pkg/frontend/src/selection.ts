// UiSelection: what the user brushed or hovered, and the highlight sets the
// panels derive from it. deriveHighlights is a pure function of the brush
// state plus server responses; no panel keeps private selection state.

import type { Fixation, TwiDef } from "./api";
import type { Dimension } from "./colors";

export type Brush =
  | { kind: "cell"; rowDim: string; colDim: string; metric: string; row: string; col: string }
  | { kind: "entities"; items: [Dimension, string][] };

export interface HoverPos {
  sampleId: string;
  t: number;
}

export interface SelectionContext {
  labels: Record<string, (string | null)[]>;
  fixations: Record<string, Fixation[]>;
  twis: TwiDef[];
  // spans for the brushed transition metric, keyed "U->V" per sample;
  // null while the fetch is still in flight
  transitionEvents: Record<string, Record<string, [number, number][]>> | null;
}

export interface HighlightSets {
  fixations: Set<string>;
  saccades: Set<string>;
  scanpathSample: string | null;
}

export function fixationKey(sampleId: string, index: number): string {
  return `${sampleId}#${index}`;
}

// a saccade is identified by the fixation ordinal it leaves from
export function saccadeKey(sampleId: string, fromIndex: number): string {
  return `${sampleId}#${fromIndex}`;
}

export function isTransitionMetric(metric: string): boolean {
  return metric === "direct" || metric === "indirect" || metric === "glance" || metric.startsWith("through:");
}

// metric id -> (kind, focus) for the transition-events endpoint
export function transitionQuery(metric: string): { kind: string; focus?: string } {
  if (metric.startsWith("through:")) return { kind: "through", focus: metric.slice("through:".length) };
  return { kind: metric };
}

function emptyHighlights(hover: HoverPos | null): HighlightSets {
  return { fixations: new Set(), saccades: new Set(), scanpathSample: hover ? hover.sampleId : null };
}

function addSpan(out: HighlightSets, sampleId: string, lo: number, hi: number) {
  for (let i = lo; i <= hi; i++) out.fixations.add(fixationKey(sampleId, i));
  for (let i = lo; i < hi; i++) out.saccades.add(saccadeKey(sampleId, i));
}

function addSampleAoi(out: HighlightSets, sampleId: string, aoiId: string, ctx: SelectionContext) {
  const labels = ctx.labels[sampleId] ?? [];
  for (let i = 0; i < labels.length; i++) {
    if (labels[i] === aoiId) out.fixations.add(fixationKey(sampleId, i));
    if (labels[i] === aoiId && labels[i + 1] === aoiId) out.saccades.add(saccadeKey(sampleId, i));
  }
}

function addEntity(out: HighlightSets, dim: string, id: string, ctx: SelectionContext) {
  if (dim === "sample") {
    const fixations = ctx.fixations[id] ?? [];
    for (const f of fixations) out.fixations.add(fixationKey(id, f.index));
    for (let i = 0; i + 1 < fixations.length; i++) out.saccades.add(saccadeKey(id, fixations[i]!.index));
    return;
  }
  if (dim === "aoi") {
    for (const sampleId of Object.keys(ctx.labels)) addSampleAoi(out, sampleId, id, ctx);
    return;
  }
  if (dim === "twi") {
    const twi = ctx.twis.find((w) => w.id === id);
    if (!twi) return;
    for (const [sampleId, fixations] of Object.entries(ctx.fixations)) {
      if (twi.sample_id !== "*" && twi.sample_id !== sampleId) continue;
      const inside = new Set<number>();
      for (const f of fixations) {
        // membership by onset, half-open window, same rule as the backend
        if (f.t_start >= twi.t_start && f.t_start < twi.t_end) inside.add(f.index);
      }
      for (const i of inside) {
        out.fixations.add(fixationKey(sampleId, i));
        if (inside.has(i + 1)) out.saccades.add(saccadeKey(sampleId, i));
      }
    }
  }
}

export function deriveHighlights(
  brush: Brush | null,
  hover: HoverPos | null,
  ctx: SelectionContext,
): HighlightSets {
  const out = emptyHighlights(hover);
  if (!brush) return out;

  if (brush.kind === "entities") {
    for (const [dim, id] of brush.items) addEntity(out, dim, id, ctx);
    return out;
  }

  // matrix cell brushes
  if (brush.rowDim === "aoi" && brush.colDim === "aoi" && isTransitionMetric(brush.metric)) {
    if (!ctx.transitionEvents) return out; // fetch in flight, highlight nothing yet
    const key = `${brush.row}->${brush.col}`;
    for (const [sampleId, events] of Object.entries(ctx.transitionEvents)) {
      for (const [lo, hi] of events[key] ?? []) addSpan(out, sampleId, lo, hi);
    }
    return out;
  }

  const rowIsSample = brush.rowDim === "sample";
  const colIsAoi = brush.colDim === "aoi";
  if (rowIsSample && colIsAoi) {
    // dwell cell: that sample's fixations inside that AOI
    addSampleAoi(out, brush.row, brush.col, ctx);
    return out;
  }

  addEntity(out, brush.rowDim, brush.row, ctx);
  addEntity(out, brush.colDim, brush.col, ctx);
  return out;
}
