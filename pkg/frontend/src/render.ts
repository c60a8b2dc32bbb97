// Canvas renderer: raster/vector hints beneath, then the active layer's
// rails and nodes, labels whose level has been reached, and highlights on
// top (drawn regardless of zoom level).

import type { Dataset, LabelItem, Viewport } from "./types.js";
import { clampedLayer, diskIntersectsRect, segIntersectsRect, zoomLevel } from "./visible.js";
import { TileCache, tileKey } from "./tilecache.js";
import type { Highlight } from "./highlight.js";
import type { ViewState } from "./viewstate.js";

export const PALETTE = ["#4878a8", "#a85148", "#58a868", "#a88a48", "#7a58a8", "#48a0a8"];
const RAIL_COLOR = "#62707e";
const HIGHLIGHT = "#e8a117";
const MAX_VECTOR_HINTS_PER_TILE = 40; // 4 tiles resident -> at most 160

export interface RenderDeps {
  ds: Dataset;
  view: ViewState;
  highlight: Highlight;
  tiles: TileCache<ImageBitmap>;
  ensureTile: (n: number, i: number, j: number) => void;
  labelIndex: Map<number, LabelItem>;
}

export function nodeScreenRadius(deps: RenderDeps): number {
  const { ds, view } = deps;
  return Math.max(
    2.5,
    (ds.meta.initial_radius * Math.min(view.screenW / ds.meta.bbox.w, view.screenH / ds.meta.bbox.h)) * 0.9,
  );
}

export function hintTilesFor(ds: Dataset, p: Viewport): [number, number, number][] {
  const n = clampedLayer(ds, p);
  const b = ds.meta.bbox;
  const tw = b.w / 2 ** n;
  const th = b.h / 2 ** n;
  const ja = Math.max(Math.floor((p.x - b.x) / tw), 0);
  const jb = Math.min(Math.floor((p.x + p.w - b.x) / tw), 2 ** n - 1);
  const ia = Math.max(Math.floor((p.y - b.y) / th), 0);
  const ib = Math.min(Math.floor((p.y + p.h - b.y) / th), 2 ** n - 1);
  const out: [number, number, number][] = [];
  for (let i = ia; i <= ib; i++) {
    for (let j = ja; j <= jb; j++) out.push([n, i, j]);
  }
  // one viewport at layer >= 1 never needs more than four tiles
  return out.slice(0, 4);
}

export function render(ctx: CanvasRenderingContext2D, deps: RenderDeps): void {
  const { ds, view, highlight, tiles } = deps;
  const p = view.viewport;
  const n = clampedLayer(ds, p);
  const layer = ds.layers[n];
  const b = ds.meta.bbox;
  ctx.clearRect(0, 0, view.screenW, view.screenH);
  ctx.fillStyle = "#fcfcf8";
  ctx.fillRect(0, 0, view.screenW, view.screenH);

  // --- background hints: raster tiles, vector fallback -------------------
  const wanted = hintTilesFor(ds, p);
  const keep = new Set(wanted.map(([tn, i, j]) => tileKey(tn, i, j)));
  tiles.retain(keep);
  const tw = b.w / 2 ** n;
  const th = b.h / 2 ** n;
  for (const [tn, i, j] of wanted) {
    const key = tileKey(tn, i, j);
    deps.ensureTile(tn, i, j);
    const img = tiles.get(key);
    const [sx0, sy1] = view.toScreen(b.x + j * tw, b.y + i * th);
    const [sx1, sy0] = view.toScreen(b.x + (j + 1) * tw, b.y + (i + 1) * th);
    if (img) {
      ctx.drawImage(img, sx0, sy0, sx1 - sx0, sy1 - sy0);
    } else if (tiles.failed.has(key)) {
      drawVectorHints(ctx, deps, n, i, j);
    }
  }

  // --- rails of the active layer -----------------------------------------
  ctx.lineWidth = 1.4;
  ctx.strokeStyle = RAIL_COLOR;
  ctx.lineCap = "round";
  ctx.beginPath();
  for (const r of layer.rails) {
    if (!segIntersectsRect(r.x1, r.y1, r.x2, r.y2, p)) continue;
    const [ax, ay] = view.toScreen(r.x1, r.y1);
    const [bx, by] = view.toScreen(r.x2, r.y2);
    ctx.moveTo(ax, ay);
    ctx.lineTo(bx, by);
  }
  ctx.stroke();

  // --- highlighted edge routes and unhidden nodes (any zoom) -------------
  if (highlight.edges.size) {
    ctx.lineWidth = 3;
    ctx.strokeStyle = HIGHLIGHT;
    ctx.beginPath();
    for (const eid of highlight.edges) {
      const route = ds.routes[String(eid)];
      if (!route) continue;
      route.points.forEach(([gx, gy], idx) => {
        const [sx, sy] = view.toScreen(gx, gy);
        if (idx === 0) ctx.moveTo(sx, sy);
        else ctx.lineTo(sx, sy);
      });
    }
    ctx.stroke();
  }

  // --- nodes (constant screen size) ---------------------------------------
  const radius = ds.meta.node_radius[n];
  const rPx = nodeScreenRadius(deps);
  for (const nd of layer.nodes) {
    if (!diskIntersectsRect(nd.x, nd.y, radius, p)) continue;
    drawNode(ctx, deps, nd.id, nd.x, nd.y, rPx, highlight.nodes.has(nd.id));
  }
  for (const vid of highlight.nodes) {
    const nd = ds.meta.nodes[vid];
    if (nd.z <= n) continue; // already drawn with the layer
    drawNode(ctx, deps, vid, nd.x, nd.y, rPx, true);
  }

  // --- labels whose ladder level has been reached --------------------------
  const z = zoomLevel(p, b);
  const fontPx = Math.max(
    9,
    deps.ds.labels.font_height * Math.min(view.screenW / b.w, view.screenH / b.h),
  );
  ctx.font = `${fontPx.toFixed(1)}px system-ui, sans-serif`;
  ctx.fillStyle = "#1d2733";
  for (const nd of layer.nodes) {
    const item = deps.labelIndex.get(nd.id);
    if (!item || item.level > z) continue;
    if (!diskIntersectsRect(nd.x, nd.y, radius * 6, p)) continue;
    const [sx, sy] = view.toScreen(nd.x, nd.y);
    drawLabel(ctx, nd.label, item.side, sx, sy, rPx, fontPx);
  }
}

function drawNode(
  ctx: CanvasRenderingContext2D,
  deps: RenderDeps,
  id: number,
  gx: number,
  gy: number,
  rPx: number,
  highlighted: boolean,
): void {
  const [sx, sy] = deps.view.toScreen(gx, gy);
  ctx.beginPath();
  ctx.arc(sx, sy, rPx, 0, Math.PI * 2);
  ctx.fillStyle = PALETTE[id % PALETTE.length];
  ctx.fill();
  if (highlighted) {
    ctx.lineWidth = 2.5;
    ctx.strokeStyle = HIGHLIGHT;
    ctx.stroke();
  }
}

function drawLabel(
  ctx: CanvasRenderingContext2D,
  text: string,
  side: string,
  sx: number,
  sy: number,
  rPx: number,
  fontPx: number,
): void {
  const pad = rPx * 1.15;
  if (side === "left") {
    ctx.textAlign = "right";
    ctx.textBaseline = "middle";
    ctx.fillText(text, sx - pad, sy);
  } else if (side === "right") {
    ctx.textAlign = "left";
    ctx.textBaseline = "middle";
    ctx.fillText(text, sx + pad, sy);
  } else if (side === "above") {
    ctx.textAlign = "center";
    ctx.textBaseline = "bottom";
    ctx.fillText(text, sx, sy - pad);
  } else {
    ctx.textAlign = "center";
    ctx.textBaseline = "top";
    ctx.fillText(text, sx, sy + pad);
  }
}

function drawVectorHints(
  ctx: CanvasRenderingContext2D,
  deps: RenderDeps,
  n: number,
  i: number,
  j: number,
): void {
  // No raster on disk for this tile: draw the first few not-yet-visible
  // node centers as translucent disks, capped per tile so at most 160
  // vector hint elements can ever be resident.
  const { ds, view } = deps;
  const b = ds.meta.bbox;
  const tw = b.w / 2 ** n;
  const th = b.h / 2 ** n;
  const x0 = b.x + j * tw;
  const y0 = b.y + i * th;
  const rPx = nodeScreenRadius(deps);
  let drawn = 0;
  ctx.globalAlpha = 0.4;
  for (let vid = 0; vid < ds.meta.nodes.length; vid++) {
    const nd = ds.meta.nodes[vid];
    if (nd.z <= n) continue;
    if (nd.x < x0 || nd.x >= x0 + tw || nd.y < y0 || nd.y >= y0 + th) continue;
    const [sx, sy] = view.toScreen(nd.x, nd.y);
    ctx.beginPath();
    ctx.arc(sx, sy, rPx, 0, Math.PI * 2);
    ctx.fillStyle = PALETTE[vid % PALETTE.length];
    ctx.fill();
    if (++drawn >= MAX_VECTOR_HINTS_PER_TILE) break;
  }
  ctx.globalAlpha = 1.0;
}
