// Typed client for the analytics backend. Every GET body carries the
// dataset version it was computed at, which is what keeps the panels honest.

export interface RectShape {
  type: "rect";
  x: number;
  y: number;
  w: number;
  h: number;
}

export interface PolygonShape {
  type: "polygon";
  vertices: [number, number][];
}

export type AoiShape = RectShape | PolygonShape;

export interface AoiDef {
  id: string;
  name: string;
  precedence: number;
  gid: number;
  shape: AoiShape;
}

export interface TwiDef {
  id: string;
  name: string;
  sample_id: string; // "*" binds the window to every sample
  t_start: number;
  t_end: number;
  gid: number;
}

export interface MatrixSpecDef {
  id: string;
  rows: string;
  cols: string;
  metric: string;
  reorder: string;
}

export interface SessionParams {
  detection: { dispersion_threshold: number; min_duration: number };
  kde: { kernel: string; bandwidth: number; grid_width: number; weighting: string };
  bundle: {
    iterations: number;
    kernel_bandwidth: number;
    smoothing: number;
    direction_split_deg: number;
  };
  nw: { match: number; mismatch: number; gap: number };
  time_fraction: number;
}

export interface SessionSummary {
  session_id: string;
  version: number;
  sample_ids: string[];
  aois: AoiDef[];
  twis: TwiDef[];
  groups: {
    samples: Record<string, number>;
    aois: Record<string, number>;
    twis: Record<string, number>;
  };
  scope: string;
  params: SessionParams;
  matrices: MatrixSpecDef[];
}

export interface Fixation {
  index: number;
  cx: number;
  cy: number;
  t_start: number;
  t_end: number;
  duration: number;
}

export interface Saccade {
  from_fixation: number;
  to_fixation: number;
  length: number;
  duration: number;
  angle: number;
}

export interface MetricRow {
  scope: string;
  entity: string;
  metric_id: string;
  value: number;
  unit: string;
  support: number;
}

export interface MatrixResponse {
  version: number;
  row_dim: string;
  col_dim: string;
  metric: string;
  row_ids: string[];
  col_ids: string[];
  values: number[][];
  symmetric: boolean;
  row_order: number[] | null;
  col_order: number[] | null;
}

export interface DensityResponse {
  version: number;
  origin: [number, number];
  cell_size: number;
  width: number;
  height: number;
  mass: number[][];
}

// [t_start, t_end, aoi_id | null, gid] per visit segment
export type TimelineSegment = [number, number, string | null, number];

export interface ApiError extends Error {
  status: number;
}

function apiError(status: number, detail: string): ApiError {
  const err = new Error(detail) as ApiError;
  err.status = status;
  return err;
}

export class ApiClient {
  constructor(readonly base: string = "") {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.base + path, init);
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const body = await resp.json();
        if (body && typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body, keep the status text
      }
      throw apiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  createSession(body?: { demo: string; stage?: number }): Promise<{ session_id: string; version: number }> {
    return this.json("/api/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: body ? JSON.stringify(body) : undefined,
    });
  }

  summary(sid: string): Promise<SessionSummary> {
    return this.json(`/api/sessions/${sid}`);
  }

  uploadSamples(sid: string, files: File[], twiColumn = false): Promise<{ version: number; sample_ids: string[] }> {
    const form = new FormData();
    for (const f of files) form.append("files", f);
    form.append("twi_column", twiColumn ? "1" : "0");
    return this.json(`/api/sessions/${sid}/samples`, { method: "POST", body: form });
  }

  private put(sid: string, what: string, body: unknown): Promise<{ version: number }> {
    return this.json(`/api/sessions/${sid}/${what}`, {
      method: "PUT",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  putAois(sid: string, aois: AoiDef[]): Promise<{ version: number }> {
    return this.put(sid, "aois", aois);
  }

  putTwis(sid: string, twis: Omit<TwiDef, "gid">[]): Promise<{ version: number }> {
    return this.put(sid, "twis", twis);
  }

  putGroups(sid: string, groups: SessionSummary["groups"]): Promise<{ version: number }> {
    return this.put(sid, "groups", groups);
  }

  putParams(sid: string, patch: Partial<SessionParams>): Promise<{ version: number }> {
    return this.put(sid, "params", patch);
  }

  putScope(sid: string, scope: string): Promise<{ version: number }> {
    return this.put(sid, "scope", { scope });
  }

  putMatrices(sid: string, specs: MatrixSpecDef[]): Promise<{ version: number }> {
    return this.put(sid, "matrices", specs);
  }

  fixations(sid: string): Promise<{ version: number; samples: Record<string, Fixation[]> }> {
    return this.json(`/api/sessions/${sid}/fixations`);
  }

  saccades(sid: string): Promise<{ version: number; samples: Record<string, Saccade[]> }> {
    return this.json(`/api/sessions/${sid}/saccades`);
  }

  labels(sid: string): Promise<{ version: number; samples: Record<string, (string | null)[]> }> {
    return this.json(`/api/sessions/${sid}/labels`);
  }

  metrics(sid: string): Promise<{ version: number; rows: MetricRow[] }> {
    return this.json(`/api/sessions/${sid}/metrics`);
  }

  matrix(sid: string, rows: string, cols: string, metric: string, reorder = "none"): Promise<MatrixResponse> {
    const q = new URLSearchParams({ rows, cols, metric, reorder });
    return this.json(`/api/sessions/${sid}/matrix?${q}`);
  }

  density(sid: string): Promise<DensityResponse> {
    return this.json(`/api/sessions/${sid}/density`);
  }

  bundles(sid: string): Promise<{ version: number; polylines: [number, number][][] }> {
    return this.json(`/api/sessions/${sid}/bundles`);
  }

  timeline(sid: string): Promise<{ version: number; samples: Record<string, TimelineSegment[]> }> {
    return this.json(`/api/sessions/${sid}/timeline`);
  }

  focusContext(sid: string, aoi: string): Promise<{ version: number; samples: Record<string, string[]> }> {
    return this.json(`/api/sessions/${sid}/focus-context?aoi=${encodeURIComponent(aoi)}`);
  }

  transitionEvents(
    sid: string,
    kind: string,
    alphabet = "aoi",
    focus?: string,
  ): Promise<{ version: number; samples: Record<string, Record<string, [number, number][]>> }> {
    const q = new URLSearchParams({ kind, alphabet });
    if (focus !== undefined) q.set("focus", focus);
    return this.json(`/api/sessions/${sid}/transition-events?${q}`);
  }

  exportUrl(sid: string): string {
    return `${this.base}/api/sessions/${sid}/export`;
  }

  async importBundle(sid: string, blob: Blob): Promise<{ version: number; warnings: string[] }> {
    return this.json(`/api/sessions/${sid}/import`, {
      method: "POST",
      headers: { "Content-Type": "application/zip" },
      body: blob,
    });
  }
}
