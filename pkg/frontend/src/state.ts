// Central store. One session, one dataset version, one brush. Panels render
// from here and never talk to the server directly, so every view answers to
// the same snapshot.
//
// Concurrency discipline: reads are cached per (version, key) and deduped
// while in flight; writes run strictly one after another through a promise
// chain; parameter edits are debounced before they become writes. The UI is
// optimistic only about drag previews, never about committed values.

import { ApiClient, type ApiError, type SessionSummary, type MatrixResponse } from "./api";
import {
  type Brush,
  type HoverPos,
  type SelectionContext,
  type HighlightSets,
  deriveHighlights,
  isTransitionMetric,
  transitionQuery,
} from "./selection";

export interface MatrixConfig {
  rows: string;
  cols: string;
  metric: string;
  reorder: string;
}

const DEFAULT_MATRIX: MatrixConfig = { rows: "aoi", cols: "aoi", metric: "direct", reorder: "none" };

export class Store {
  readonly api: ApiClient;
  sid: string | null = null;
  version = 0;
  summary: SessionSummary | null = null;
  connected = true;

  brush: Brush | null = null;
  hover: HoverPos | null = null;
  matrixConfig: MatrixConfig = { ...DEFAULT_MATRIX };
  histogramView = false;
  focusedSample: string | null = null;

  // AOI display order shared by the matrix and the scarf rows; the matrix
  // response is the source of truth whenever one of its axes is the AOI dim
  aoiOrder: string[] = [];

  lastError: string | null = null;

  private cache = new Map<string, { version: number; data: unknown }>();
  private inflight = new Map<string, Promise<unknown>>();
  private pendingOps = 0;
  private writeChain: Promise<unknown> = Promise.resolve();
  private debounceTimers = new Map<string, ReturnType<typeof setTimeout>>();
  private listeners = new Set<() => void>();

  constructor(api: ApiClient) {
    this.api = api;
  }

  subscribe(fn: () => void): () => void {
    this.listeners.add(fn);
    return () => this.listeners.delete(fn);
  }

  private notify() {
    for (const fn of this.listeners) fn();
  }

  // resolves once no fetch, write, or debounce timer is outstanding
  async whenIdle(): Promise<void> {
    for (;;) {
      if (this.pendingOps === 0 && this.debounceTimers.size === 0) {
        await new Promise((r) => setTimeout(r, 2));
        if (this.pendingOps === 0 && this.debounceTimers.size === 0) return;
      } else {
        await new Promise((r) => setTimeout(r, 5));
      }
    }
  }

  private track<T>(p: Promise<T>): Promise<T> {
    this.pendingOps += 1;
    return p.finally(() => {
      this.pendingOps -= 1;
    });
  }

  async openSession(body?: { demo: string; stage?: number }): Promise<string> {
    const created = await this.track(this.api.createSession(body));
    this.sid = created.session_id;
    this.brush = null;
    this.hover = null;
    this.cache.clear();
    await this.refresh();
    return this.sid;
  }

  async refresh(): Promise<void> {
    if (!this.sid) return;
    try {
      const summary = await this.track(this.api.summary(this.sid));
      this.connected = true;
      const versionChanged = summary.version !== this.version;
      this.version = summary.version;
      this.summary = summary;
      if (versionChanged) {
        for (const [key, entry] of this.cache) {
          if (entry.version !== this.version) this.cache.delete(key);
        }
      }
      const aoiIds = summary.aois.map((a) => a.id);
      if (!sameMembers(this.aoiOrder, aoiIds)) this.aoiOrder = aoiIds;
      if (this.focusedSample === null || !summary.sample_ids.includes(this.focusedSample)) {
        this.focusedSample = summary.sample_ids[0] ?? null;
      }
    } catch (err) {
      this.connected = false;
      this.lastError = errorText(err);
    }
    this.notify();
  }

  // memoized read; one fetch per (version, key) no matter how many panels ask
  query<T>(key: string, fetcher: () => Promise<T>): T | null {
    const hit = this.cache.get(key);
    if (hit && hit.version === this.version) return hit.data as T;
    if (!this.inflight.has(key)) {
      const p = this.track(fetcher())
        .then((data) => {
          const version = (data as { version?: number }).version ?? this.version;
          this.cache.set(key, { version, data });
          this.inflight.delete(key);
          if (version !== this.version) void this.refresh();
          else this.notify();
          return data;
        })
        .catch((err) => {
          this.inflight.delete(key);
          this.lastError = errorText(err);
          this.notify();
          throw err;
        });
      this.inflight.set(key, p.catch(() => undefined) as Promise<unknown>);
    }
    return null;
  }

  // serialized write; refreshes the summary (and thus the version) on success
  mutate(run: (api: ApiClient, sid: string) => Promise<{ version: number }>): Promise<boolean> {
    const result = this.writeChain.then(async () => {
      if (!this.sid) return false;
      try {
        await run(this.api, this.sid);
        this.lastError = null;
        await this.refresh();
        return true;
      } catch (err) {
        this.lastError = errorText(err);
        this.notify();
        return false;
      }
    });
    this.writeChain = result;
    return this.track(result);
  }

  debounce(key: string, ms: number, fn: () => void): void {
    const existing = this.debounceTimers.get(key);
    if (existing !== undefined) clearTimeout(existing);
    this.debounceTimers.set(
      key,
      setTimeout(() => {
        this.debounceTimers.delete(key);
        fn();
      }, ms),
    );
  }

  setBrush(brush: Brush | null) {
    this.brush = brush;
    this.notify();
  }

  setHover(hover: HoverPos | null) {
    this.hover = hover;
    this.notify();
  }

  setMatrixConfig(config: Partial<MatrixConfig>) {
    this.matrixConfig = { ...this.matrixConfig, ...config };
    this.brush = null;
    this.notify();
  }

  // -- typed reads used by the panels --------------------------------------

  fixations() {
    const sid = this.sid;
    return sid ? this.query(`fixations`, () => this.api.fixations(sid)) : null;
  }

  saccades() {
    const sid = this.sid;
    return sid ? this.query(`saccades`, () => this.api.saccades(sid)) : null;
  }

  labels() {
    const sid = this.sid;
    return sid ? this.query(`labels`, () => this.api.labels(sid)) : null;
  }

  metrics() {
    const sid = this.sid;
    return sid ? this.query(`metrics`, () => this.api.metrics(sid)) : null;
  }

  timeline() {
    const sid = this.sid;
    return sid ? this.query(`timeline`, () => this.api.timeline(sid)) : null;
  }

  density() {
    const sid = this.sid;
    return sid ? this.query(`density`, () => this.api.density(sid)) : null;
  }

  bundles() {
    const sid = this.sid;
    return sid ? this.query(`bundles`, () => this.api.bundles(sid)) : null;
  }

  matrix(): MatrixResponse | null {
    const sid = this.sid;
    if (!sid) return null;
    const { rows, cols, metric, reorder } = this.matrixConfig;
    const key = `matrix:${rows}:${cols}:${metric}:${reorder}`;
    const resp = this.query(key, () => this.api.matrix(sid, rows, cols, metric, reorder));
    if (resp) this.syncAoiOrder(resp);
    return resp;
  }

  // "constantly synchronised": scarf rows follow the matrix AOI order,
  // including after a global reorder permutes it
  private syncAoiOrder(matrix: MatrixResponse) {
    const ids = matrix.row_dim === "aoi" ? matrix.row_ids : matrix.col_dim === "aoi" ? matrix.col_ids : null;
    if (ids && !sameList(this.aoiOrder, ids) && sameMembers(this.aoiOrder, ids)) {
      this.aoiOrder = [...ids];
      queueMicrotask(() => this.notify());
    }
  }

  transitionEventsFor(metric: string) {
    const sid = this.sid;
    if (!sid || !isTransitionMetric(metric)) return null;
    const { kind, focus } = transitionQuery(metric);
    const key = `transition-events:${kind}:${focus ?? ""}`;
    return this.query(key, () => this.api.transitionEvents(sid, kind, "aoi", focus));
  }

  // highlight sets are recomputed from scratch on every render: pure in the
  // brush/hover plus whatever responses are cached right now
  highlights(): HighlightSets {
    const ctx: SelectionContext = {
      labels: this.labels()?.samples ?? {},
      fixations: this.fixations()?.samples ?? {},
      twis: this.summary?.twis ?? [],
      transitionEvents: null,
    };
    if (this.brush && this.brush.kind === "cell" && isTransitionMetric(this.brush.metric)) {
      ctx.transitionEvents = this.transitionEventsFor(this.brush.metric)?.samples ?? null;
    }
    return deriveHighlights(this.brush, this.hover, ctx);
  }
}

function sameList(a: string[], b: string[]): boolean {
  return a.length === b.length && a.every((v, i) => v === b[i]);
}

function sameMembers(a: string[], b: string[]): boolean {
  if (a.length !== b.length) return false;
  const set = new Set(a);
  return b.every((v) => set.has(v));
}

function errorText(err: unknown): string {
  if (err instanceof Error) {
    const status = (err as ApiError).status;
    return status ? `${status}: ${err.message}` : err.message;
  }
  return String(err);
}
