// Parameter panel: detection, density, bundling parameters plus the analysis
// scope. Edits debounce into a single PUT; rejected values surface inline and
// the fields snap back to the committed state on the next render.

import type { SessionParams } from "../api";
import type { Store } from "../state";
import { el, Panel } from "./base";

type Section = "detection" | "kde" | "bundle";

interface FieldSpec {
  label: string;
  section: Section;
  key: string;
}

const NUMERIC_FIELDS: FieldSpec[] = [
  { label: "dispersion threshold", section: "detection", key: "dispersion_threshold" },
  { label: "min duration (ms)", section: "detection", key: "min_duration" },
  { label: "density bandwidth", section: "kde", key: "bandwidth" },
  { label: "density grid width", section: "kde", key: "grid_width" },
  { label: "bundling iterations", section: "bundle", key: "iterations" },
  { label: "bundling bandwidth", section: "bundle", key: "kernel_bandwidth" },
  { label: "bundling smoothing", section: "bundle", key: "smoothing" },
];

function committedValue(params: SessionParams, field: FieldSpec): number {
  return (params[field.section] as Record<string, number>)[field.key]!;
}

export class ParamsPanel extends Panel {
  private inputs = new Map<string, HTMLInputElement>();
  readonly scopeInput: HTMLInputElement;
  readonly kernelSelect: HTMLSelectElement;
  readonly weightingSelect: HTMLSelectElement;

  constructor(store: Store) {
    super(store, "Parameters", "params");
    const grid = el("div", "param-grid");

    for (const field of NUMERIC_FIELDS) {
      grid.appendChild(el("label", "control-label", field.label));
      const input = el("input") as HTMLInputElement;
      input.type = "number";
      input.dataset.role = field.label;
      input.addEventListener("input", () => this.queueCommit());
      this.inputs.set(field.label, input);
      grid.appendChild(input);
    }

    grid.appendChild(el("label", "control-label", "density kernel"));
    this.kernelSelect = selectOf(["gaussian", "epanechnikov"]);
    this.kernelSelect.addEventListener("change", () => this.queueCommit());
    grid.appendChild(this.kernelSelect);

    grid.appendChild(el("label", "control-label", "density weighting"));
    this.weightingSelect = selectOf(["by_duration", "uniform"]);
    this.weightingSelect.addEventListener("change", () => this.queueCommit());
    grid.appendChild(this.weightingSelect);

    grid.appendChild(el("label", "control-label", "scope"));
    this.scopeInput = el("input") as HTMLInputElement;
    this.scopeInput.dataset.role = "scope";
    this.scopeInput.addEventListener("change", () => {
      const scope = this.scopeInput.value.trim();
      void this.store.mutate((api, sid) => api.putScope(sid, scope));
    });
    grid.appendChild(this.scopeInput);

    this.body.appendChild(grid);
  }

  private queueCommit() {
    this.store.debounce("params", 200, () => void this.commit());
  }

  // collect every field that differs from the committed params into one PUT
  private async commit() {
    const committed = this.store.summary?.params;
    if (!committed) return;

    const next: Record<Section, Record<string, number | string>> = {
      detection: { ...committed.detection },
      kde: { ...committed.kde },
      bundle: { ...committed.bundle },
    };
    const touched = new Set<Section>();

    for (const field of NUMERIC_FIELDS) {
      const input = this.inputs.get(field.label)!;
      const value = Number(input.value);
      if (input.value === "" || !Number.isFinite(value)) continue;
      if (value !== committedValue(committed, field)) {
        next[field.section][field.key] = value;
        touched.add(field.section);
      }
    }
    if (this.kernelSelect.value !== committed.kde.kernel) {
      next.kde.kernel = this.kernelSelect.value;
      touched.add("kde");
    }
    if (this.weightingSelect.value !== committed.kde.weighting) {
      next.kde.weighting = this.weightingSelect.value;
      touched.add("kde");
    }
    if (touched.size === 0) return;

    const patch: Record<string, unknown> = {};
    for (const section of touched) patch[section] = next[section];
    await this.store.mutate((api, sid) => api.putParams(sid, patch as Partial<SessionParams>));
  }

  render(): void {
    this.stampVersion(this.store.version);
    this.showError(this.store.connected ? this.store.lastError : "disconnected");
    const params = this.store.summary?.params;
    if (!params) return;
    // snap fields to committed values unless the user is mid-edit
    for (const field of NUMERIC_FIELDS) {
      const input = this.inputs.get(field.label)!;
      if (document.activeElement !== input) input.value = String(committedValue(params, field));
    }
    if (document.activeElement !== this.kernelSelect) this.kernelSelect.value = params.kde.kernel;
    if (document.activeElement !== this.weightingSelect) this.weightingSelect.value = params.kde.weighting;
    if (document.activeElement !== this.scopeInput) this.scopeInput.value = this.store.summary?.scope ?? "";
  }
}

function selectOf(options: string[]): HTMLSelectElement {
  const select = el("select") as HTMLSelectElement;
  for (const value of options) {
    const option = el("option", undefined, value) as HTMLOptionElement;
    option.value = value;
    select.appendChild(option);
  }
  return select;
}
