// Label search: case-insensitive substring over node labels; focusing a
// result pans/zooms until the node is visible at its own zoom level.

import type { Dataset, Viewport } from "./types.js";

export interface SearchHit {
  id: number;
  label: string;
}

export function searchLabels(ds: Dataset, query: string): SearchHit[] {
  const q = query.toLowerCase();
  if (!q) return [];
  const hits: SearchHit[] = [];
  for (let v = 0; v < ds.meta.nodes.length; v++) {
    const label = ds.meta.nodes[v].label;
    if (label.toLowerCase().includes(q)) hits.push({ id: v, label });
  }
  return hits;
}

/**
 * Viewport centered on the node, zoomed so the node's layer is active:
 * zoom just past 2^z(v) (the level where it first appears).
 */
export function focusViewport(ds: Dataset, nodeId: number, aspect: number): Viewport {
  const node = ds.meta.nodes[nodeId];
  const b = ds.meta.bbox;
  const zoom = Math.min(2 ** node.z * 1.25, 2 ** (ds.meta.layer_count - 1) * 1.25);
  let w = b.w / zoom;
  let h = b.h / zoom;
  if (aspect > 0) {
    // keep the requested screen aspect while staying at least that zoomed
    if (w / h > aspect) w = h * aspect;
    else h = w / aspect;
  }
  return { x: node.x - w / 2, y: node.y - h / 2, w, h };
}
