/**
 * Report panel: ranked feature bars plus the shape function of the
 * clicked feature.
 *
 * The bars are rendered in the exact order the report lists them —
 * the service already ranked by importance, and re-sorting on the
 * client could only disagree with it. Shape functions are drawn as
 * step plots because the model is piecewise constant per bin; a
 * smoothed curve would claim structure the model does not have.
 */

import type { Report, ShapeFunction } from "./api.js";
import { ServiceError } from "./api.js";

export interface ReportPanelOptions {
  /** Step plot width in px. */
  plotWidth?: number;
  /** Step plot height in px. */
  plotHeight?: number;
}

function fmt(x: number): string {
  if (x === 0) return "0";
  const a = Math.abs(x);
  if (a >= 1000 || a < 0.001) return x.toExponential(2);
  return x.toPrecision(4);
}

export class ReportPanel {
  readonly root: HTMLElement;
  private readonly metaLine: HTMLElement;
  private readonly noteLine: HTMLElement;
  private readonly errorBox: HTMLElement;
  private readonly retryButton: HTMLButtonElement;
  private readonly statusLine: HTMLElement;
  private readonly barsBox: HTMLElement;
  private readonly shapeBox: HTMLElement;
  private readonly plotWidth: number;
  private readonly plotHeight: number;

  private report: Report | null = null;
  private featureCb: ((name: string) => void) | null = null;
  private retryCb: (() => void) | null = null;

  constructor(container: HTMLElement, options: ReportPanelOptions = {}) {
    this.plotWidth = options.plotWidth ?? 480;
    this.plotHeight = options.plotHeight ?? 160;
    const doc = container.ownerDocument;

    this.root = doc.createElement("div");
    this.root.className = "report-panel";

    this.statusLine = doc.createElement("div");
    this.statusLine.className = "report-status";
    this.metaLine = doc.createElement("div");
    this.metaLine.className = "report-meta";
    this.noteLine = doc.createElement("div");
    this.noteLine.className = "direction-note";
    this.errorBox = doc.createElement("div");
    this.errorBox.className = "report-error";
    this.retryButton = doc.createElement("button");
    this.retryButton.className = "retry";
    this.retryButton.textContent = "Retry";
    this.retryButton.addEventListener("click", () => this.retryCb?.());
    this.barsBox = doc.createElement("div");
    this.barsBox.className = "bars";
    this.shapeBox = doc.createElement("div");
    this.shapeBox.className = "shape-panel";

    for (const el of [
      this.statusLine,
      this.metaLine,
      this.noteLine,
      this.errorBox,
      this.retryButton,
      this.barsBox,
      this.shapeBox,
    ]) {
      this.root.appendChild(el);
    }
    this.clear();
    container.appendChild(this.root);
  }

  onFeatureClick(cb: (name: string) => void): void {
    this.featureCb = cb;
  }

  onRetry(cb: () => void): void {
    this.retryCb = cb;
  }

  clear(): void {
    this.report = null;
    this.statusLine.textContent = "";
    this.metaLine.textContent = "";
    this.noteLine.textContent = "";
    this.hideError();
    this.barsBox.textContent = "";
    this.shapeBox.textContent = "";
  }

  renderLoading(): void {
    this.hideError();
    this.statusLine.textContent = "Training explanation model…";
  }

  renderReport(report: Report): void {
    this.report = report;
    this.statusLine.textContent = "";
    this.hideError();
    this.renderMeta(report);
    this.renderBars(report);
    this.shapeBox.textContent = "";
  }

  /** Inline message for a structured service rejection (e.g. 422). */
  renderServiceError(err: ServiceError): void {
    this.statusLine.textContent = "";
    this.errorBox.textContent = err.body.message;
    this.errorBox.style.display = "";
    this.retryButton.style.display = "none";
  }

  /** Transport failure: show the message and offer a retry. */
  renderNetworkError(err: Error): void {
    this.statusLine.textContent = "";
    this.errorBox.textContent = `Request failed: ${err.message}`;
    this.errorBox.style.display = "";
    this.retryButton.style.display = "";
  }

  private hideError(): void {
    this.errorBox.textContent = "";
    this.errorBox.style.display = "none";
    this.retryButton.style.display = "none";
  }

  private renderMeta(report: Report): void {
    const m = report.meta;
    const sizes =
      report.mode === "comparison"
        ? `A ${m.selection_a_size} vs B ${m.selection_b_size}`
        : `selection ${m.n_pos} vs rest ${m.n_neg}`;
    this.metaLine.textContent = `seed ${m.seed} · ${sizes} · AUC ${fmt(m.auc)}`;
    this.noteLine.textContent = report.direction_note ?? "";
    if (m.no_separating_signal) {
      this.statusLine.textContent =
        "No separating signal: the selection is indistinguishable from the rest.";
    }
  }

  private renderBars(report: Report): void {
    const doc = this.root.ownerDocument;
    this.barsBox.textContent = "";
    for (const entry of report.ranked) {
      const row = doc.createElement("div");
      row.className = "bar-row";
      row.setAttribute("data-feature", entry.name);

      const label = doc.createElement("span");
      label.className = "bar-label";
      label.textContent = entry.name;

      const track = doc.createElement("div");
      track.className = "bar-track";
      const fill = doc.createElement("div");
      fill.className = "bar-fill";
      fill.style.width = `${(entry.share * 100).toFixed(1)}%`;
      track.appendChild(fill);

      const value = doc.createElement("span");
      value.className = "bar-value";
      value.textContent = fmt(entry.importance);

      row.appendChild(label);
      row.appendChild(track);
      row.appendChild(value);
      row.addEventListener("click", () => {
        this.renderShape(entry.name);
        this.featureCb?.(entry.name);
      });
      this.barsBox.appendChild(row);
    }
  }

  /**
   * Draw the named feature's shape function as a step plot: one
   * horizontal segment per bin, so a shape with E cut points renders
   * E + 2 segments (E + 1 value bins plus the missing-value bin).
   */
  renderShape(name: string): void {
    const shape = this.report?.shapes[name];
    if (!shape) return;
    this.shapeBox.textContent = "";
    const doc = this.root.ownerDocument;
    const title = doc.createElement("div");
    title.className = "shape-title";
    title.textContent = `Shape function: ${name}`;
    this.shapeBox.appendChild(title);
    this.shapeBox.appendChild(this.buildStepPlot(shape));
  }

  private buildStepPlot(shape: ShapeFunction): SVGSVGElement {
    const doc = this.root.ownerDocument;
    const ns = "http://www.w3.org/2000/svg";
    const svg = doc.createElementNS(ns, "svg") as SVGSVGElement;
    svg.setAttribute("class", "step-plot");
    svg.setAttribute("width", String(this.plotWidth));
    svg.setAttribute("height", String(this.plotHeight));

    const contrib = shape.contributions;
    const nBins = contrib.length; // edges.length + 2
    const padX = 30;
    const padY = 12;
    const gap = 8; // separates the missing bin from the value bins
    const innerW = this.plotWidth - 2 * padX - gap;
    const innerH = this.plotHeight - 2 * padY;
    const binW = innerW / nBins;

    let lo = Math.min(0, ...contrib);
    let hi = Math.max(0, ...contrib);
    if (lo === hi) {
      lo -= 1;
      hi += 1;
    }
    const yOf = (v: number): number =>
      padY + ((hi - v) / (hi - lo)) * innerH;

    const xOf = (bin: number): number => {
      // the missing bin sits after a visual gap
      const shift = bin === nBins - 1 ? gap : 0;
      return padX + bin * binW + shift;
    };

    // zero line for orientation
    const zero = doc.createElementNS(ns, "line");
    zero.setAttribute("class", "zero-line");
    zero.setAttribute("x1", String(padX));
    zero.setAttribute("x2", String(this.plotWidth - padX));
    zero.setAttribute("y1", yOf(0).toFixed(2));
    zero.setAttribute("y2", yOf(0).toFixed(2));
    svg.appendChild(zero);

    for (let b = 0; b < nBins; b++) {
      const seg = doc.createElementNS(ns, "line");
      const missing = b === nBins - 1;
      seg.setAttribute("class", missing ? "shape-seg missing" : "shape-seg");
      seg.setAttribute("x1", xOf(b).toFixed(2));
      seg.setAttribute("x2", (xOf(b) + binW).toFixed(2));
      seg.setAttribute("y1", yOf(contrib[b]).toFixed(2));
      seg.setAttribute("y2", yOf(contrib[b]).toFixed(2));
      svg.appendChild(seg);

      // risers between adjacent value bins keep the steps readable
      if (b > 0 && !missing) {
        const riser = doc.createElementNS(ns, "line");
        riser.setAttribute("class", "shape-riser");
        riser.setAttribute("x1", xOf(b).toFixed(2));
        riser.setAttribute("x2", xOf(b).toFixed(2));
        riser.setAttribute("y1", yOf(contrib[b - 1]).toFixed(2));
        riser.setAttribute("y2", yOf(contrib[b]).toFixed(2));
        svg.appendChild(riser);
      }
    }

    // cut points label the boundaries between value bins
    for (let e = 0; e < shape.edges.length; e++) {
      const label = doc.createElementNS(ns, "text");
      label.setAttribute("class", "edge-label");
      label.setAttribute("x", xOf(e + 1).toFixed(2));
      label.setAttribute("y", String(this.plotHeight - 2));
      label.setAttribute("text-anchor", "middle");
      label.textContent = fmt(shape.edges[e]);
      svg.appendChild(label);
    }
    const missLabel = doc.createElementNS(ns, "text");
    missLabel.setAttribute("class", "edge-label");
    missLabel.setAttribute("x", (xOf(nBins - 1) + binW / 2).toFixed(2));
    missLabel.setAttribute("y", String(this.plotHeight - 2));
    missLabel.setAttribute("text-anchor", "middle");
    missLabel.textContent = "missing";
    svg.appendChild(missLabel);

    return svg;
  }
}
