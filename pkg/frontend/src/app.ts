// App shell: builds the five panels, wires them to one store, and lays them
// out on a grid with draggable splits. Rendering is coalesced per microtask
// so a burst of store changes paints once.

import { ApiClient } from "./api";
import { DataPanel } from "./panels/data";
import { MetricsPanel } from "./panels/metrics";
import { ParamsPanel } from "./panels/params";
import { SpatialPanel } from "./panels/spatial";
import { TimelinePanel } from "./panels/timeline";
import { el } from "./panels/base";
import { Store } from "./state";

export interface App {
  store: Store;
  data: DataPanel;
  spatial: SpatialPanel;
  metrics: MetricsPanel;
  timeline: TimelinePanel;
  params: ParamsPanel;
  root: HTMLElement;
  // true when every panel's version badge shows the same dataset version
  versionsConsistent(): boolean;
}

export function buildApp(mount: HTMLElement, baseUrl = ""): App {
  const store = new Store(new ApiClient(baseUrl));
  const data = new DataPanel(store);
  const spatial = new SpatialPanel(store);
  const metrics = new MetricsPanel(store);
  const timeline = new TimelinePanel(store);
  const params = new ParamsPanel(store);
  const panels = [data, spatial, metrics, timeline, params];

  const root = el("div", "app-grid");
  const topRow = el("div", "app-row app-top");
  topRow.append(data.root, makeSplit(topRow, "col"), spatial.root, makeSplit(topRow, "col"), metrics.root);
  const bottomRow = el("div", "app-row app-bottom");
  bottomRow.append(timeline.root, makeSplit(bottomRow, "col"), params.root);
  root.append(topRow, makeSplit(root, "row"), bottomRow);
  mount.appendChild(root);

  let scheduled = false;
  const renderAll = () => {
    scheduled = false;
    for (const panel of panels) panel.render();
  };
  store.subscribe(() => {
    if (scheduled) return;
    scheduled = true;
    queueMicrotask(renderAll);
  });
  renderAll();

  return {
    store,
    data,
    spatial,
    metrics,
    timeline,
    params,
    root,
    versionsConsistent() {
      const badges = panels.map(
        (p) => p.root.querySelector<HTMLElement>('[data-role="version"]')!.textContent,
      );
      return badges.every((b) => b === badges[0]);
    },
  };
}

// a divider the user can drag to resize the flanking panels
function makeSplit(container: HTMLElement, axis: "col" | "row"): HTMLElement {
  const split = el("div", `split split-${axis}`);
  let dragging = false;
  split.addEventListener("mousedown", (ev) => {
    dragging = true;
    ev.preventDefault();
  });
  const onMove = (ev: MouseEvent) => {
    if (!dragging) return;
    const prev = split.previousElementSibling as HTMLElement | null;
    if (!prev) return;
    const rect = prev.getBoundingClientRect();
    if (axis === "col") prev.style.flexBasis = `${Math.max(120, ev.clientX - rect.left)}px`;
    else prev.style.flexBasis = `${Math.max(100, ev.clientY - rect.top)}px`;
  };
  const onUp = () => {
    dragging = false;
  };
  container.addEventListener("mousemove", onMove);
  if (typeof window !== "undefined") window.addEventListener("mouseup", onUp);
  return split;
}
