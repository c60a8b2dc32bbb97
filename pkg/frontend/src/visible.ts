// Viewport -> rendered entity selection.  This mirrors the verifier on the
// dataset side exactly (same closed-set intersection predicates, same
// clamped layer rule), which the fixture agreement test pins down.

import type { BBox, Dataset, Rail, Viewport } from "./types.js";

export function zoomLevel(p: Viewport, b: BBox): number {
  return Math.min(b.w / p.w, b.h / p.h);
}

export function layerIndex(z: number): number {
  return Math.max(0, Math.floor(Math.log2(z)));
}

export function clampedLayer(ds: Dataset, p: Viewport): number {
  return Math.min(layerIndex(zoomLevel(p, ds.meta.bbox)), ds.meta.layer_count - 1);
}

export function diskIntersectsRect(
  cx: number,
  cy: number,
  r: number,
  rect: Viewport,
): boolean {
  const dx = Math.max(rect.x - cx, 0, cx - (rect.x + rect.w));
  const dy = Math.max(rect.y - cy, 0, cy - (rect.y + rect.h));
  return dx * dx + dy * dy <= r * r;
}

function ptOnSeg(px: number, py: number, ax: number, ay: number, bx: number, by: number): boolean {
  const vx = bx - ax;
  const vy = by - ay;
  const L2 = vx * vx + vy * vy;
  if (L2 === 0) return px === ax && py === ay;
  let t = ((px - ax) * vx + (py - ay) * vy) / L2;
  if (t < 0) t = 0;
  else if (t > 1) t = 1;
  const dx = px - (ax + t * vx);
  const dy = py - (ay + t * vy);
  return dx * dx + dy * dy === 0;
}

export function segIntersectsRect(
  x1: number,
  y1: number,
  x2: number,
  y2: number,
  rect: Viewport,
): boolean {
  const rx0 = rect.x;
  const ry0 = rect.y;
  const rx1 = rect.x + rect.w;
  const ry1 = rect.y + rect.h;
  if (Math.max(x1, x2) < rx0 || Math.min(x1, x2) > rx1) return false;
  if (Math.max(y1, y2) < ry0 || Math.min(y1, y2) > ry1) return false;
  const inside = (px: number, py: number) => rx0 <= px && px <= rx1 && ry0 <= py && py <= ry1;
  if (inside(x1, y1) || inside(x2, y2)) return true;
  const cxs = [rx0, rx1, rx1, rx0];
  const cys = [ry0, ry0, ry1, ry1];
  for (let i = 0; i < 4; i++) {
    const qx1 = cxs[i];
    const qy1 = cys[i];
    const qx2 = cxs[(i + 1) % 4];
    const qy2 = cys[(i + 1) % 4];
    const d1 = (qx2 - qx1) * (y1 - qy1) - (qy2 - qy1) * (x1 - qx1);
    const d2 = (qx2 - qx1) * (y2 - qy1) - (qy2 - qy1) * (x2 - qx1);
    const d3 = (x2 - x1) * (qy1 - y1) - (y2 - y1) * (qx1 - x1);
    const d4 = (x2 - x1) * (qy2 - y1) - (y2 - y1) * (qx2 - x1);
    if (d1 > 0 !== d2 > 0 && d3 > 0 !== d4 > 0 && d1 !== 0 && d2 !== 0 && d3 !== 0 && d4 !== 0) {
      return true;
    }
    if (ptOnSeg(qx1, qy1, x1, y1, x2, y2)) return true;
    if (ptOnSeg(x1, y1, qx1, qy1, qx2, qy2) || ptOnSeg(x2, y2, qx1, qy1, qx2, qy2)) return true;
  }
  return false;
}

export interface VisibleSet {
  layer: number;
  nodes: number[];
  rails: number[];
  railCover: number[]; // deduplicated maximal ancestors, sorted
}

export function visibleSet(ds: Dataset, p: Viewport): VisibleSet {
  const n = clampedLayer(ds, p);
  const layer = ds.layers[n];
  const radius = ds.meta.node_radius[n];
  const nodes: number[] = [];
  for (const nd of layer.nodes) {
    if (diskIntersectsRect(nd.x, nd.y, radius, p)) nodes.push(nd.id);
  }
  const rails: number[] = [];
  const cover = new Set<number>();
  for (const r of layer.rails) {
    if (segIntersectsRect(r.x1, r.y1, r.x2, r.y2, p)) {
      rails.push(r.id);
      cover.add(r.max);
    }
  }
  return { layer: n, nodes, rails, railCover: [...cover].sort((a, b) => a - b) };
}

export function visibleRails(ds: Dataset, p: Viewport): Rail[] {
  const n = clampedLayer(ds, p);
  return ds.layers[n].rails.filter((r) => segIntersectsRect(r.x1, r.y1, r.x2, r.y2, p));
}
