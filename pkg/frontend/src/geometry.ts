/**
 * Point-in-polygon tests for lasso selection.
 *
 * The selection rule is strict containment under the even-odd rule:
 * points exactly on a polygon edge or vertex are NOT selected. That
 * keeps the lasso deterministic — a point can never be "half in" —
 * and matches how the server treats the id list (plain membership).
 */

export interface Point {
  /** Horizontal coordinate, in data units (not pixels). */
  x: number;
  /** Vertical coordinate, in data units. */
  y: number;
}

/**
 * True when `p` lies exactly on the closed segment [a, b].
 *
 * Exact arithmetic on purpose: the boundary rule is "excluded", and an
 * epsilon here would turn that into a fuzzy band that shifts with zoom.
 */
export function pointOnSegment(p: Point, a: Point, b: Point): boolean {
  const cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
  if (cross !== 0) return false;
  return (
    Math.min(a.x, b.x) <= p.x &&
    p.x <= Math.max(a.x, b.x) &&
    Math.min(a.y, b.y) <= p.y &&
    p.y <= Math.max(a.y, b.y)
  );
}

/**
 * A polygon is degenerate when it cannot enclose any area: fewer than
 * three vertices, or all vertices collinear. Degenerate lassos are
 * treated as a no-op by the callers.
 */
export function isDegeneratePolygon(polygon: Point[]): boolean {
  if (polygon.length < 3) return true;
  let area2 = 0;
  for (let i = 0; i < polygon.length; i++) {
    const a = polygon[i];
    const b = polygon[(i + 1) % polygon.length];
    area2 += a.x * b.y - b.x * a.y;
  }
  return area2 === 0;
}

/**
 * Even-odd point-in-polygon test, strict inside.
 *
 * Returns false for points on the boundary and for degenerate
 * polygons. The polygon is implicitly closed (last vertex connects
 * back to the first).
 */
export function pointInPolygon(p: Point, polygon: Point[]): boolean {
  if (polygon.length < 3) return false;

  let inside = false;
  for (let i = 0; i < polygon.length; i++) {
    const a = polygon[i];
    const b = polygon[(i + 1) % polygon.length];
    // boundary is excluded, so settle it before counting crossings
    if (pointOnSegment(p, a, b)) return false;
    if (a.y > p.y !== b.y > p.y) {
      const xCross = a.x + ((p.y - a.y) / (b.y - a.y)) * (b.x - a.x);
      if (xCross > p.x) inside = !inside;
    }
  }
  return inside;
}

/**
 * Indices of all points strictly inside the polygon, ascending.
 * Degenerate polygons select nothing.
 */
export function pointsInPolygon(points: readonly Point[], polygon: Point[]): number[] {
  if (isDegeneratePolygon(polygon)) return [];
  const hit: number[] = [];
  for (let i = 0; i < points.length; i++) {
    if (pointInPolygon(points[i], polygon)) hit.push(i);
  }
  return hit;
}
