// Shared panel chrome: title bar with a version badge, an inline error slot,
// and a body. Canvas panels additionally keep a plain-data render model so
// interaction logic stays testable where no raster context exists.

import type { Store } from "../state";

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

// headless test environments (jsdom) have no raster context; models and hit
// testing still run, only the actual painting is skipped
export function canPaint(): boolean {
  return typeof navigator === "undefined" || !/jsdom/i.test(navigator.userAgent);
}

export function context2d(canvas: HTMLCanvasElement): CanvasRenderingContext2D | null {
  if (!canPaint()) return null;
  return canvas.getContext("2d");
}

export abstract class Panel {
  readonly root: HTMLElement;
  readonly body: HTMLElement;
  protected readonly versionBadge: HTMLElement;
  protected readonly errorSlot: HTMLElement;

  constructor(
    readonly store: Store,
    readonly title: string,
    kind: string,
  ) {
    this.root = el("section", `panel panel-${kind}`);
    const header = el("header", "panel-header");
    header.appendChild(el("span", "panel-title", title));
    this.errorSlot = el("span", "panel-error");
    this.versionBadge = el("span", "panel-version", "v-");
    this.versionBadge.dataset.role = "version";
    header.appendChild(this.errorSlot);
    header.appendChild(this.versionBadge);
    this.root.appendChild(header);
    this.body = el("div", "panel-body");
    this.root.appendChild(this.body);
  }

  // every panel stamps the dataset version it rendered from; the app-level
  // consistency check (and the UI tests) compare these badges for equality
  protected stampVersion(version: number) {
    this.versionBadge.textContent = `v${version}`;
  }

  protected showError(message: string | null) {
    this.errorSlot.textContent = message ?? "";
  }

  abstract render(): void;
}

export function canvasIn(body: HTMLElement, width: number, height: number): HTMLCanvasElement {
  const canvas = el("canvas", "panel-canvas");
  canvas.width = width;
  canvas.height = height;
  body.appendChild(canvas);
  return canvas;
}

// canvas-local pointer coordinates
export function localXY(canvas: HTMLCanvasElement, ev: MouseEvent): [number, number] {
  const rect = canvas.getBoundingClientRect();
  return [ev.clientX - rect.left, ev.clientY - rect.top];
}
