// deriveHighlights is a pure function of the brush plus server responses;
// these cases pin it against the worked six-fixation sequence A,B,-,A,C,A
// whose transition spans are known by hand.

import { describe, expect, it } from "vitest";
import type { Fixation } from "../src/api";
import { deriveHighlights, transitionQuery, type SelectionContext } from "../src/selection";

const LABELS: (string | null)[] = ["A", "B", null, "A", "C", "A"];

function fixationsFor(labels: (string | null)[]): Fixation[] {
  return labels.map((_, i) => ({
    index: i,
    cx: 50 + 200 * i,
    cy: 50,
    t_start: 200 * i,
    t_end: 200 * i + 120,
    duration: 120,
  }));
}

function ctx(overrides: Partial<SelectionContext> = {}): SelectionContext {
  return {
    labels: { demo: LABELS },
    fixations: { demo: fixationsFor(LABELS) },
    twis: [],
    transitionEvents: {
      demo: {
        "A->B": [[0, 1]],
        "A->C": [[3, 4]],
        "C->A": [[4, 5]],
      },
    },
    ...overrides,
  };
}

function cell(metric: string, row: string, col: string) {
  return { kind: "cell" as const, rowDim: "aoi", colDim: "aoi", metric, row, col };
}

describe("deriveHighlights", () => {
  it("direct cell (A,B) highlights exactly one saccade", () => {
    const hl = deriveHighlights(cell("direct", "A", "B"), null, ctx());
    expect([...hl.saccades]).toEqual(["demo#0"]);
    expect([...hl.fixations].sort()).toEqual(["demo#0", "demo#1"]);
  });

  it("diagonal cell highlights nothing", () => {
    const hl = deriveHighlights(cell("direct", "A", "A"), null, ctx());
    expect(hl.saccades.size).toBe(0);
    expect(hl.fixations.size).toBe(0);
  });

  it("indirect span covers the barrier fixation and both hops", () => {
    const events = { demo: { "B->A": [[1, 3]] as [number, number][] } };
    const hl = deriveHighlights(cell("indirect", "B", "A"), null, ctx({ transitionEvents: events }));
    expect([...hl.fixations].sort()).toEqual(["demo#1", "demo#2", "demo#3"]);
    expect([...hl.saccades].sort()).toEqual(["demo#1", "demo#2"]);
  });

  it("glance span covers the out-and-back triple", () => {
    const events = { demo: { "A->C": [[3, 5]] as [number, number][] } };
    const hl = deriveHighlights(cell("glance", "A", "C"), null, ctx({ transitionEvents: events }));
    expect([...hl.fixations].sort()).toEqual(["demo#3", "demo#4", "demo#5"]);
    expect([...hl.saccades].sort()).toEqual(["demo#3", "demo#4"]);
  });

  it("highlights nothing while the span fetch is still in flight", () => {
    const hl = deriveHighlights(cell("direct", "A", "B"), null, ctx({ transitionEvents: null }));
    expect(hl.fixations.size).toBe(0);
    expect(hl.saccades.size).toBe(0);
  });

  it("AOI entity brush picks fixations in that AOI, saccades only inside it", () => {
    const hl = deriveHighlights({ kind: "entities", items: [["aoi", "A"]] }, null, ctx());
    expect([...hl.fixations].sort()).toEqual(["demo#0", "demo#3", "demo#5"]);
    expect(hl.saccades.size).toBe(0); // no two consecutive fixations stay in A
  });

  it("sample entity brush takes everything of that sample", () => {
    const hl = deriveHighlights({ kind: "entities", items: [["sample", "demo"]] }, null, ctx());
    expect(hl.fixations.size).toBe(6);
    expect(hl.saccades.size).toBe(5);
  });

  it("TWI entity brush uses onset membership in a half-open window", () => {
    const twi = { id: "w1", name: "w1", sample_id: "*", t_start: 0, t_end: 450, gid: 0 };
    const hl = deriveHighlights({ kind: "entities", items: [["twi", "w1"]] }, null, ctx({ twis: [twi] }));
    // onsets 0, 200, 400 fall inside [0, 450); 600+ do not
    expect([...hl.fixations].sort()).toEqual(["demo#0", "demo#1", "demo#2"]);
    expect([...hl.saccades].sort()).toEqual(["demo#0", "demo#1"]);
  });

  it("dwell cell (sample, aoi) intersects instead of unioning", () => {
    const brush = { kind: "cell" as const, rowDim: "sample", colDim: "aoi", metric: "fixation_count", row: "demo", col: "A" };
    const hl = deriveHighlights(brush, null, ctx());
    expect([...hl.fixations].sort()).toEqual(["demo#0", "demo#3", "demo#5"]);
  });

  it("hover names the scanpath sample without touching highlight sets", () => {
    const hl = deriveHighlights(null, { sampleId: "demo", t: 300 }, ctx());
    expect(hl.scanpathSample).toBe("demo");
    expect(hl.fixations.size).toBe(0);
  });
});

describe("transitionQuery", () => {
  it("splits a focus metric into kind and focus", () => {
    expect(transitionQuery("through:TOOL")).toEqual({ kind: "through", focus: "TOOL" });
    expect(transitionQuery("direct")).toEqual({ kind: "direct" });
  });
});
