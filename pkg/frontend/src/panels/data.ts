// Data control panel: session lifecycle (new, demo datasets, bundle
// import/export), TSV upload, and the entity lists with group color chips.
// Clicking an entity brushes it; clicking again clears.

import { colorForGroup, type Dimension } from "../colors";
import type { Store } from "../state";
import { el, Panel } from "./base";

export class DataPanel extends Panel {
  readonly entityList: HTMLElement;
  readonly sessionLabel: HTMLElement;
  readonly fileInput: HTMLInputElement;
  readonly importInput: HTMLInputElement;

  constructor(store: Store) {
    super(store, "Data", "data");

    const actions = el("div", "panel-controls");
    const newButton = el("button", undefined, "new session");
    newButton.addEventListener("click", () => void this.store.openSession());
    actions.appendChild(newButton);
    for (const [label, body] of [
      ["demo: hit-rate stages", { demo: "haar", stage: 0 }],
      ["demo: linked views", { demo: "linking" }],
    ] as const) {
      const button = el("button", undefined, label);
      button.addEventListener("click", () => void this.store.openSession(body));
      actions.appendChild(button);
    }
    this.body.appendChild(actions);

    this.sessionLabel = el("div", "session-label", "no session");
    this.sessionLabel.dataset.role = "session";
    this.body.appendChild(this.sessionLabel);

    const io = el("div", "panel-controls");
    this.fileInput = el("input") as HTMLInputElement;
    this.fileInput.type = "file";
    this.fileInput.multiple = true;
    this.fileInput.accept = ".tsv,.txt";
    this.fileInput.addEventListener("change", () => void this.upload());
    io.appendChild(this.fileInput);

    const exportLink = el("a", undefined, "export bundle");
    exportLink.dataset.role = "export";
    exportLink.addEventListener("click", (ev) => {
      ev.preventDefault();
      if (this.store.sid) window.open(this.store.api.exportUrl(this.store.sid), "_blank");
    });
    io.appendChild(exportLink);

    this.importInput = el("input") as HTMLInputElement;
    this.importInput.type = "file";
    this.importInput.accept = ".zip";
    this.importInput.addEventListener("change", () => void this.importBundle());
    io.appendChild(this.importInput);
    this.body.appendChild(io);

    this.entityList = el("div", "entity-list");
    this.body.appendChild(this.entityList);
  }

  private async upload() {
    const files = Array.from(this.fileInput.files ?? []);
    if (files.length === 0 || !this.store.sid) return;
    await this.store.mutate((api, sid) => api.uploadSamples(sid, files));
    this.fileInput.value = "";
  }

  private async importBundle() {
    const file = this.importInput.files?.[0];
    if (!file || !this.store.sid) return;
    await this.store.mutate(async (api, sid) => {
      const result = await api.importBundle(sid, file);
      if (result.warnings.length > 0) this.showError(result.warnings.join("; "));
      return result;
    });
    this.importInput.value = "";
  }

  render(): void {
    const summary = this.store.summary;
    this.stampVersion(this.store.version);
    this.showError(this.store.connected ? this.store.lastError : "disconnected");
    this.sessionLabel.textContent = summary
      ? `${summary.session_id} - scope ${summary.scope}`
      : "no session";

    this.entityList.textContent = "";
    if (!summary) return;

    const section = (title: string, dim: Dimension, items: { id: string; label: string; gid: number }[]) => {
      const head = el("div", "entity-head", title);
      this.entityList.appendChild(head);
      for (const item of items) {
        const row = el("div", "entity-row");
        row.dataset.dim = dim;
        row.dataset.id = item.id;
        const chip = el("span", "group-chip");
        chip.style.background = colorForGroup(dim, item.gid);
        row.appendChild(chip);
        row.appendChild(el("span", undefined, item.label));
        if (this.isBrushed(dim, item.id)) row.classList.add("brushed");
        row.addEventListener("click", () => this.toggleBrush(dim, item.id));
        this.entityList.appendChild(row);
      }
    };

    section(
      "samples",
      "sample",
      summary.sample_ids.map((id) => ({ id, label: id, gid: summary.groups.samples[id] ?? 0 })),
    );
    section(
      "AOIs",
      "aoi",
      summary.aois.map((a) => ({ id: a.id, label: a.name, gid: a.gid })),
    );
    section(
      "windows",
      "twi",
      summary.twis.map((w) => ({ id: w.id, label: w.name, gid: w.gid })),
    );
  }

  private isBrushed(dim: Dimension, id: string): boolean {
    const brush = this.store.brush;
    return brush?.kind === "entities" && brush.items.some(([d, i]) => d === dim && i === id);
  }

  private toggleBrush(dim: Dimension, id: string) {
    this.store.setBrush(this.isBrushed(dim, id) ? null : { kind: "entities", items: [[dim, id]] });
  }
}
