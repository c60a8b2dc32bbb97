// Click semantics, kept pure for testability.
//
// Node click: highlight every incident edge and unhide all neighbors;
// clicking the same node again clears it.  Rail click: highlight the
// rail's precomputed most-important edge and unhide its two endpoints.
// Highlighted elements render regardless of the current zoom level.

import type { Dataset } from "./types.js";

export interface Highlight {
  anchor: string | null; // "node:<id>" or "rail:<id>", for toggling
  edges: Set<number>;
  nodes: Set<number>; // unhidden nodes (drawn even when not in the layer)
}

export function emptyHighlight(): Highlight {
  return { anchor: null, edges: new Set(), nodes: new Set() };
}

export function onNodeClick(ds: Dataset, h: Highlight, nodeId: number): Highlight {
  const anchor = `node:${nodeId}`;
  if (h.anchor === anchor) return emptyHighlight();
  const edges = new Set<number>();
  const nodes = new Set<number>([nodeId]);
  ds.meta.edges.forEach(([u, v], eid) => {
    if (u === nodeId || v === nodeId) {
      edges.add(eid);
      nodes.add(u === nodeId ? v : u);
    }
  });
  return { anchor, edges, nodes };
}

export function onRailClick(ds: Dataset, h: Highlight, railId: number): Highlight {
  const anchor = `rail:${railId}`;
  if (h.anchor === anchor) return emptyHighlight();
  let top: number | null = null;
  for (const layer of ds.layers) {
    for (const r of layer.rails) {
      if (r.id === railId) {
        top = r.top_edge;
        break;
      }
    }
    if (top !== null) break;
  }
  if (top === null) return emptyHighlight();
  const [u, v] = ds.meta.edges[top];
  return { anchor, edges: new Set([top]), nodes: new Set([u, v]) };
}
