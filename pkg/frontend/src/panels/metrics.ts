// Metrics panel: the relationship matrix with cell brushing, switchable to a
// histogram of the same cells. Axis dimensions, metric, and reorder mode are
// picked in the header; the chosen AOI order is published to the store so
// the timeline scarf rows track it.

import type { MatrixResponse } from "../api";
import type { Store } from "../state";
import { canvasIn, context2d, el, localXY, Panel } from "./base";

const LABEL_GUTTER = 72;
const CELL_LIMIT = 48; // readable cap; larger matrices clamp cell size

const DIM_CHOICES = ["sample", "sample_group", "aoi", "aoi_group", "twi", "twi_group"];
const METRIC_CHOICES = [
  "fixation_count",
  "total_duration",
  "mean_duration",
  "median_duration",
  "pct_time",
  "visit_count",
  "mean_visit_duration",
  "haar",
  "direct",
  "indirect",
  "glance",
  "nw",
  "cosine",
  "density",
];

interface Cell {
  row: string;
  col: string;
  x: number;
  y: number;
  w: number;
  h: number;
  value: number;
  brushed: boolean;
}

interface MetricsModel {
  cells: Cell[];
  rowIds: string[];
  colIds: string[];
  maxValue: number;
  histogram: boolean;
}

export class MetricsPanel extends Panel {
  readonly canvas: HTMLCanvasElement;
  readonly rowsSelect: HTMLSelectElement;
  readonly colsSelect: HTMLSelectElement;
  readonly metricSelect: HTMLSelectElement;
  readonly reorderToggle: HTMLInputElement;
  readonly viewToggle: HTMLButtonElement;
  model: MetricsModel | null = null;

  constructor(store: Store) {
    super(store, "Metrics", "metrics");
    const controls = el("div", "panel-controls");
    this.rowsSelect = makeSelect(DIM_CHOICES, store.matrixConfig.rows);
    this.colsSelect = makeSelect(DIM_CHOICES, store.matrixConfig.cols);
    this.metricSelect = makeSelect(METRIC_CHOICES, store.matrixConfig.metric);
    this.reorderToggle = el("input") as HTMLInputElement;
    this.reorderToggle.type = "checkbox";
    this.reorderToggle.dataset.role = "reorder";
    this.viewToggle = el("button", "view-toggle", "histogram") as HTMLButtonElement;

    const reorderLabel = el("label", "control-label", "reorder");
    reorderLabel.prepend(this.reorderToggle);
    controls.append(this.rowsSelect, el("span", "control-x", "x"), this.colsSelect, this.metricSelect, reorderLabel, this.viewToggle);
    this.body.appendChild(controls);
    this.canvas = canvasIn(this.body, 520, 420);

    const apply = () =>
      this.store.setMatrixConfig({
        rows: this.rowsSelect.value,
        cols: this.colsSelect.value,
        metric: this.metricSelect.value,
        reorder: this.reorderToggle.checked ? "global" : "none",
      });
    this.rowsSelect.addEventListener("change", apply);
    this.colsSelect.addEventListener("change", apply);
    this.metricSelect.addEventListener("change", apply);
    this.reorderToggle.addEventListener("change", apply);
    this.viewToggle.addEventListener("click", () => {
      this.store.histogramView = !this.store.histogramView;
      this.viewToggle.textContent = this.store.histogramView ? "matrix" : "histogram";
      this.render();
    });

    this.canvas.addEventListener("mousedown", (ev) => this.onDown(ev));
  }

  buildModel(matrix: MatrixResponse): MetricsModel {
    const brush = this.store.brush;
    const histogram = this.store.histogramView;
    const model: MetricsModel = {
      cells: [],
      rowIds: matrix.row_ids,
      colIds: matrix.col_ids,
      maxValue: 0,
      histogram,
    };
    for (const row of matrix.values) for (const v of row) model.maxValue = Math.max(model.maxValue, v);

    if (histogram) {
      // one bar per cell, canonical order, value-scaled height
      const n = matrix.row_ids.length * matrix.col_ids.length;
      const barW = Math.max(3, Math.min(24, (this.canvas.width - 2 * 10) / Math.max(n, 1)));
      let i = 0;
      for (let r = 0; r < matrix.row_ids.length; r++) {
        for (let c = 0; c < matrix.col_ids.length; c++) {
          const value = matrix.values[r]![c]!;
          const h = model.maxValue > 0 ? (value / model.maxValue) * (this.canvas.height - 40) : 0;
          model.cells.push({
            row: matrix.row_ids[r]!,
            col: matrix.col_ids[c]!,
            x: 10 + i * barW,
            y: this.canvas.height - 20 - h,
            w: barW - 1,
            h,
            value,
            brushed: isBrushed(brush, matrix.row_ids[r]!, matrix.col_ids[c]!),
          });
          i++;
        }
      }
      return model;
    }

    const cellW = Math.min(
      CELL_LIMIT,
      (this.canvas.width - LABEL_GUTTER - 10) / Math.max(matrix.col_ids.length, 1),
    );
    const cellH = Math.min(
      CELL_LIMIT,
      (this.canvas.height - LABEL_GUTTER - 10) / Math.max(matrix.row_ids.length, 1),
    );
    for (let r = 0; r < matrix.row_ids.length; r++) {
      for (let c = 0; c < matrix.col_ids.length; c++) {
        model.cells.push({
          row: matrix.row_ids[r]!,
          col: matrix.col_ids[c]!,
          x: LABEL_GUTTER + c * cellW,
          y: LABEL_GUTTER + r * cellH,
          w: cellW,
          h: cellH,
          value: matrix.values[r]![c]!,
          brushed: isBrushed(brush, matrix.row_ids[r]!, matrix.col_ids[c]!),
        });
      }
    }
    return model;
  }

  render(): void {
    const matrix = this.store.matrix();
    this.stampVersion(matrix?.version ?? this.store.version);
    this.showError(this.store.connected ? this.store.lastError : "disconnected");
    if (!matrix) {
      this.model = null;
      return;
    }
    this.model = this.buildModel(matrix);
    this.paint(this.model);
  }

  cellAt(px: number, py: number): Cell | null {
    for (const cell of this.model?.cells ?? []) {
      if (px >= cell.x && px <= cell.x + cell.w && py >= cell.y && py <= cell.y + cell.h) return cell;
    }
    return null;
  }

  // px center of one cell, for tests and for focus outlines
  cellCenter(row: string, col: string): [number, number] | null {
    const cell = this.model?.cells.find((c) => c.row === row && c.col === col);
    return cell ? [cell.x + cell.w / 2, cell.y + cell.h / 2] : null;
  }

  private onDown(ev: MouseEvent) {
    const [px, py] = localXY(this.canvas, ev);
    const cell = this.cellAt(px, py);
    const config = this.store.matrixConfig;
    if (!cell) {
      this.store.setBrush(null);
      return;
    }
    const already =
      this.store.brush?.kind === "cell" &&
      this.store.brush.row === cell.row &&
      this.store.brush.col === cell.col;
    this.store.setBrush(
      already
        ? null
        : {
            kind: "cell",
            rowDim: config.rows,
            colDim: config.cols,
            metric: config.metric,
            row: cell.row,
            col: cell.col,
          },
    );
  }

  private paint(model: MetricsModel) {
    const ctx = context2d(this.canvas);
    if (!ctx) return;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    ctx.font = "11px sans-serif";

    for (const cell of model.cells) {
      const t = model.maxValue > 0 ? cell.value / model.maxValue : 0;
      ctx.fillStyle = model.histogram ? "#4062bb" : shade(t);
      ctx.fillRect(cell.x, cell.y, cell.w, cell.h);
      if (cell.brushed) {
        ctx.strokeStyle = "#ffd60a";
        ctx.lineWidth = 3;
        ctx.strokeRect(cell.x + 1.5, cell.y + 1.5, cell.w - 3, cell.h - 3);
      } else if (!model.histogram) {
        ctx.strokeStyle = "#e2e5e9";
        ctx.lineWidth = 1;
        ctx.strokeRect(cell.x, cell.y, cell.w, cell.h);
      }
    }

    if (!model.histogram) {
      ctx.fillStyle = "#333";
      model.rowIds.forEach((id, r) => {
        const cell = model.cells[r * model.colIds.length];
        if (cell) ctx.fillText(id.slice(0, 10), 4, cell.y + cell.h / 2 + 4);
      });
      model.colIds.forEach((id, c) => {
        const cell = model.cells[c];
        if (cell) {
          ctx.save();
          ctx.translate(cell.x + cell.w / 2 + 4, LABEL_GUTTER - 6);
          ctx.rotate(-Math.PI / 4);
          ctx.fillText(id.slice(0, 10), 0, 0);
          ctx.restore();
        }
      });
    }
  }
}

function isBrushed(brush: Store["brush"], row: string, col: string): boolean {
  return brush?.kind === "cell" && brush.row === row && brush.col === col;
}

function makeSelect(options: string[], selected: string): HTMLSelectElement {
  const select = el("select") as HTMLSelectElement;
  for (const value of options) {
    const option = el("option", undefined, value) as HTMLOptionElement;
    option.value = value;
    if (value === selected) option.selected = true;
    select.appendChild(option);
  }
  return select;
}

// white -> blue ramp
function shade(t: number): string {
  const lightness = 97 - t * 55;
  return `hsl(222, 60%, ${lightness}%)`;
}
