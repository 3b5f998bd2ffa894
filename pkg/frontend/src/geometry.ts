// Pure geometry helpers shared by the canvas panels. Panels keep their hit
// regions in plain data so interaction logic is testable without a raster
// context.

import type { AoiShape, RectShape } from "./api";

export interface Bounds {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
}

export function growBounds(b: Bounds | null, x: number, y: number): Bounds {
  if (!b) return { x0: x, y0: y, x1: x, y1: y };
  return {
    x0: Math.min(b.x0, x),
    y0: Math.min(b.y0, y),
    x1: Math.max(b.x1, x),
    y1: Math.max(b.y1, y),
  };
}

export function shapeBounds(shape: AoiShape): Bounds {
  if (shape.type === "rect") {
    return { x0: shape.x, y0: shape.y, x1: shape.x + shape.w, y1: shape.y + shape.h };
  }
  let b: Bounds | null = null;
  for (const [vx, vy] of shape.vertices) b = growBounds(b, vx, vy);
  return b ?? { x0: 0, y0: 0, x1: 1, y1: 1 };
}

// uniform scale, data y grows downward like canvas y
export class Transform {
  constructor(
    readonly scale: number,
    readonly offsetX: number,
    readonly offsetY: number,
  ) {}

  toPx(x: number, y: number): [number, number] {
    return [x * this.scale + this.offsetX, y * this.scale + this.offsetY];
  }

  toData(px: number, py: number): [number, number] {
    return [(px - this.offsetX) / this.scale, (py - this.offsetY) / this.scale];
  }
}

export function fitBounds(bounds: Bounds, widthPx: number, heightPx: number, pad = 16): Transform {
  const spanX = Math.max(bounds.x1 - bounds.x0, 1e-9);
  const spanY = Math.max(bounds.y1 - bounds.y0, 1e-9);
  const scale = Math.min((widthPx - 2 * pad) / spanX, (heightPx - 2 * pad) / spanY);
  const offsetX = pad - bounds.x0 * scale + ((widthPx - 2 * pad) - spanX * scale) / 2;
  const offsetY = pad - bounds.y0 * scale + ((heightPx - 2 * pad) - spanY * scale) / 2;
  return new Transform(scale, offsetX, offsetY);
}

// corner order: nw, ne, se, sw
export function rectCorners(r: RectShape): [number, number][] {
  return [
    [r.x, r.y],
    [r.x + r.w, r.y],
    [r.x + r.w, r.y + r.h],
    [r.x, r.y + r.h],
  ];
}

// move one rect corner, keeping the opposite corner fixed
export function dragRectCorner(r: RectShape, corner: number, x: number, y: number): RectShape {
  const corners = rectCorners(r);
  const opposite = corners[(corner + 2) % 4]!;
  return {
    type: "rect",
    x: Math.min(x, opposite[0]),
    y: Math.min(y, opposite[1]),
    w: Math.abs(x - opposite[0]),
    h: Math.abs(y - opposite[1]),
  };
}

export function pointNear(px: number, py: number, x: number, y: number, radius: number): boolean {
  const dx = px - x;
  const dy = py - y;
  return dx * dx + dy * dy <= radius * radius;
}

export function pointInRect(px: number, py: number, x: number, y: number, w: number, h: number): boolean {
  return px >= x && px <= x + w && py >= y && py <= y + h;
}
