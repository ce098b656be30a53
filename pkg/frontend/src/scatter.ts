/**
 * SVG projection scatterplot with lasso selection.
 *
 * One mark per rendered point, addressed by row id. The lasso is
 * captured in screen space but resolved in data space: every vertex is
 * inverted through the current view transform before the containment
 * test, so the same data-space polygon selects the same ids at any
 * zoom or pan.
 */

import { isDegeneratePolygon, Point, pointsInPolygon } from "./geometry.js";

export interface ScatterOptions {
  /** Viewport width in px (explicit — never read from layout). */
  width?: number;
  /** Viewport height in px. */
  height?: number;
  /** Fraction of the viewport kept as padding when fitting data. */
  margin?: number;
}

export interface LassoResult {
  /** Row ids strictly inside the lasso, ascending. */
  ids: number[];
  /** The lasso polygon in data coordinates. */
  polygon: Point[];
}

interface Transform {
  kx: number;
  ky: number;
  ox: number;
  oy: number;
}

const IDENTITY: Transform = { kx: 1, ky: -1, ox: 0, oy: 0 };

export class ScatterView {
  readonly root: HTMLElement;
  readonly svg: SVGSVGElement;
  private readonly marksLayer: SVGGElement;
  private readonly lassoPath: SVGPolylineElement;
  private readonly emptyNote: HTMLElement;
  private readonly width: number;
  private readonly height: number;
  private readonly margin: number;

  private points: Point[] = [];
  private transform: Transform = IDENTITY;
  private lassoScreen: Point[] = [];
  private lassoActive = false;
  private lassoCb: ((result: LassoResult) => void) | null = null;

  constructor(container: HTMLElement, options: ScatterOptions = {}) {
    this.width = options.width ?? 640;
    this.height = options.height ?? 480;
    this.margin = options.margin ?? 0.05;

    this.root = container.ownerDocument.createElement("div");
    this.root.className = "scatter";
    this.svg = container.ownerDocument.createElementNS(
      "http://www.w3.org/2000/svg",
      "svg",
    ) as SVGSVGElement;
    this.svg.setAttribute("width", String(this.width));
    this.svg.setAttribute("height", String(this.height));
    this.svg.setAttribute("class", "scatter-svg");

    this.marksLayer = container.ownerDocument.createElementNS(
      "http://www.w3.org/2000/svg",
      "g",
    ) as SVGGElement;
    this.lassoPath = container.ownerDocument.createElementNS(
      "http://www.w3.org/2000/svg",
      "polyline",
    ) as SVGPolylineElement;
    this.lassoPath.setAttribute("class", "lasso-path");
    this.svg.appendChild(this.marksLayer);
    this.svg.appendChild(this.lassoPath);

    this.emptyNote = container.ownerDocument.createElement("div");
    this.emptyNote.className = "empty-state";
    this.emptyNote.textContent =
      "No points to display. Upload a dataset and compute a projection.";

    this.root.appendChild(this.emptyNote);
    this.root.appendChild(this.svg);
    container.appendChild(this.root);

    this.bindPointerEvents();
    this.renderMarks();
  }

  onLasso(cb: (result: LassoResult) => void): void {
    this.lassoCb = cb;
  }

  /** Replace the rendered points and refit the view transform. */
  setData(coords: [number, number][]): void {
    this.points = coords.map(([x, y]) => ({ x, y }));
    this.fitTransform();
    this.renderMarks();
  }

  /** Highlight selections; A and B get distinct mark classes. */
  setSelections(a: readonly number[], b: readonly number[]): void {
    const inA = new Set(a);
    const inB = new Set(b);
    const marks = this.marksLayer.children;
    for (let i = 0; i < marks.length; i++) {
      const mark = marks[i] as SVGCircleElement;
      const id = Number(mark.getAttribute("data-id"));
      let cls = "pt";
      if (inA.has(id)) cls += " sel-a";
      else if (inB.has(id)) cls += " sel-b";
      mark.setAttribute("class", cls);
    }
  }

  /** Zoom by `factor` keeping the screen point (sx, sy) fixed. */
  zoom(factor: number, sx: number, sy: number): void {
    const t = this.transform;
    this.transform = {
      kx: t.kx * factor,
      ky: t.ky * factor,
      ox: sx - (sx - t.ox) * factor,
      oy: sy - (sy - t.oy) * factor,
    };
    this.renderMarks();
  }

  pan(dx: number, dy: number): void {
    this.transform = { ...this.transform, ox: this.transform.ox + dx, oy: this.transform.oy + dy };
    this.renderMarks();
  }

  screenFromData(p: Point): Point {
    const t = this.transform;
    return { x: p.x * t.kx + t.ox, y: p.y * t.ky + t.oy };
  }

  dataFromScreen(p: Point): Point {
    const t = this.transform;
    return { x: (p.x - t.ox) / t.kx, y: (p.y - t.oy) / t.ky };
  }

  // --- lasso pipeline -----------------------------------------------------
  // Tests drive these directly; pointer events feed them in the browser.

  beginLasso(screen: Point): void {
    this.lassoActive = true;
    this.lassoScreen = [screen];
    this.drawLassoFeedback();
  }

  extendLasso(screen: Point): void {
    if (!this.lassoActive) return;
    this.lassoScreen.push(screen);
    this.drawLassoFeedback();
  }

  /**
   * Close the lasso and resolve it against the data. Degenerate
   * polygons (fewer than three vertices, zero area) are a no-op: no
   * callback fires and the current selection is untouched.
   */
  completeLasso(): LassoResult | null {
    if (!this.lassoActive) return null;
    this.lassoActive = false;
    const screen = this.lassoScreen;
    this.lassoScreen = [];
    this.drawLassoFeedback();

    const polygon = screen.map((p) => this.dataFromScreen(p));
    if (isDegeneratePolygon(polygon)) return null;
    const result = { ids: pointsInPolygon(this.points, polygon), polygon };
    this.lassoCb?.(result);
    return result;
  }

  /** Resolve a polygon already in data coordinates (zoom-independent). */
  selectByDataPolygon(polygon: Point[]): number[] {
    return pointsInPolygon(this.points, polygon);
  }

  // --- internals ----------------------------------------------------------

  private fitTransform(): void {
    if (this.points.length === 0) {
      this.transform = IDENTITY;
      return;
    }
    let minX = Infinity;
    let maxX = -Infinity;
    let minY = Infinity;
    let maxY = -Infinity;
    for (const p of this.points) {
      if (p.x < minX) minX = p.x;
      if (p.x > maxX) maxX = p.x;
      if (p.y < minY) minY = p.y;
      if (p.y > maxY) maxY = p.y;
    }
    const spanX = maxX - minX || 1;
    const spanY = maxY - minY || 1;
    const pad = this.margin;
    const kx = (this.width * (1 - 2 * pad)) / spanX;
    // y axis flips: data up is screen up
    const ky = -(this.height * (1 - 2 * pad)) / spanY;
    this.transform = {
      kx,
      ky,
      ox: this.width * pad - minX * kx,
      oy: this.height * (1 - pad) - minY * ky,
    };
  }

  private renderMarks(): void {
    const doc = this.svg.ownerDocument;
    this.emptyNote.style.display = this.points.length === 0 ? "" : "none";
    this.svg.style.display = this.points.length === 0 ? "none" : "";

    while (this.marksLayer.firstChild) {
      this.marksLayer.removeChild(this.marksLayer.firstChild);
    }
    for (let i = 0; i < this.points.length; i++) {
      const s = this.screenFromData(this.points[i]);
      const mark = doc.createElementNS("http://www.w3.org/2000/svg", "circle");
      mark.setAttribute("class", "pt");
      mark.setAttribute("data-id", String(i));
      mark.setAttribute("cx", s.x.toFixed(2));
      mark.setAttribute("cy", s.y.toFixed(2));
      mark.setAttribute("r", "3");
      this.marksLayer.appendChild(mark);
    }
  }

  private drawLassoFeedback(): void {
    this.lassoPath.setAttribute(
      "points",
      this.lassoScreen.map((p) => `${p.x},${p.y}`).join(" "),
    );
  }

  private bindPointerEvents(): void {
    const local = (ev: PointerEvent): Point => {
      const rect = this.svg.getBoundingClientRect();
      return { x: ev.clientX - rect.left, y: ev.clientY - rect.top };
    };
    this.svg.addEventListener("pointerdown", (ev) => {
      if (ev.shiftKey) return; // shift reserved for pan
      this.svg.setPointerCapture?.(ev.pointerId);
      this.beginLasso(local(ev));
    });
    this.svg.addEventListener("pointermove", (ev) => {
      if (ev.shiftKey && ev.buttons) {
        this.pan(ev.movementX, ev.movementY);
        return;
      }
      if (this.lassoActive && ev.buttons) this.extendLasso(local(ev));
    });
    this.svg.addEventListener("pointerup", () => {
      this.completeLasso();
    });
    this.svg.addEventListener("wheel", (ev) => {
      ev.preventDefault();
      const rect = this.svg.getBoundingClientRect();
      const factor = ev.deltaY < 0 ? 1.2 : 1 / 1.2;
      this.zoom(factor, ev.clientX - rect.left, ev.clientY - rect.top);
    });
  }
}
