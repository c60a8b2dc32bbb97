// Application wiring: dataset load, canvas, interactions, search, hash.

import { loadDataset, loadTileImage, tileUrl } from "./data.js";
import { emptyHighlight, onNodeClick, onRailClick, type Highlight } from "./highlight.js";
import { nodeScreenRadius, render, type RenderDeps } from "./render.js";
import { focusViewport, searchLabels } from "./search.js";
import { TileCache, tileKey } from "./tilecache.js";
import type { Dataset, LabelItem } from "./types.js";
import { ViewState } from "./viewstate.js";
import { clampedLayer } from "./visible.js";

const DATASET_BASE = new URLSearchParams(location.search).get("dataset") ?? "..";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing #${id}`);
  return node as T;
}

async function start(): Promise<void> {
  const canvas = el<HTMLCanvasElement>("map");
  const banner = el<HTMLDivElement>("banner");
  const status = el<HTMLDivElement>("status");
  const searchBox = el<HTMLInputElement>("search");
  const results = el<HTMLUListElement>("results");
  const clearBtn = el<HTMLButtonElement>("clear");

  let ds: Dataset;
  try {
    ds = await loadDataset(DATASET_BASE);
  } catch (err) {
    banner.textContent = `dataset load failed: ${err}`;
    banner.hidden = false;
    return;
  }

  const ctx = canvas.getContext("2d")!;
  const view = new ViewState(ds.meta.bbox, canvas.clientWidth, canvas.clientHeight);
  if (location.hash) view.applyHash(location.hash);
  let highlight: Highlight = emptyHighlight();
  const tiles = new TileCache<ImageBitmap>();
  const labelIndex = new Map<number, LabelItem>(ds.labels.items.map((it) => [it.id, it]));

  const deps: RenderDeps = {
    ds,
    view,
    highlight,
    tiles,
    labelIndex,
    ensureTile: (n, i, j) =>
      tiles.ensure(
        tileKey(n, i, j),
        (signal) => loadTileImage(tileUrl(DATASET_BASE, n, i, j), signal),
        scheduleDraw,
      ),
  };

  let drawPending = false;
  function scheduleDraw(): void {
    if (drawPending) return;
    drawPending = true;
    requestAnimationFrame(() => {
      drawPending = false;
      try {
        deps.highlight = highlight;
        fitCanvas();
        render(ctx, deps);
        const n = clampedLayer(ds, view.viewport);
        status.textContent =
          `layer ${n}/${ds.meta.layer_count - 1} · ` +
          `${ds.layers[n].nodes.length} nodes, ${ds.layers[n].rails.length} rails in layer`;
        history.replaceState(null, "", view.hash());
        banner.hidden = true;
      } catch (err) {
        banner.textContent = `render failed: ${err}`;
        banner.hidden = false; // stale frame stays on the canvas
      }
    });
  }

  function fitCanvas(): void {
    const dpr = window.devicePixelRatio || 1;
    const w = canvas.clientWidth;
    const h = canvas.clientHeight;
    if (canvas.width !== w * dpr || canvas.height !== h * dpr) {
      canvas.width = w * dpr;
      canvas.height = h * dpr;
    }
    ctx.setTransform(dpr, 0, 0, dpr, 0, 0);
    if (view.screenW !== w || view.screenH !== h) view.resize(w, h);
  }

  // --- pointer interactions ------------------------------------------------
  let dragging = false;
  let moved = false;
  let last: [number, number] = [0, 0];
  canvas.addEventListener("pointerdown", (ev) => {
    dragging = true;
    moved = false;
    last = [ev.clientX, ev.clientY];
    canvas.setPointerCapture(ev.pointerId);
  });
  canvas.addEventListener("pointermove", (ev) => {
    if (!dragging) return;
    const dx = ev.clientX - last[0];
    const dy = ev.clientY - last[1];
    if (Math.abs(dx) + Math.abs(dy) > 2) moved = true;
    view.panByPixels(dx, dy);
    last = [ev.clientX, ev.clientY];
    scheduleDraw();
  });
  canvas.addEventListener("pointerup", (ev) => {
    dragging = false;
    if (!moved) handleClick(ev.offsetX, ev.offsetY);
  });
  canvas.addEventListener("wheel", (ev) => {
    ev.preventDefault();
    view.zoomAt(ev.offsetX, ev.offsetY, ev.deltaY < 0 ? 1.25 : 0.8);
    scheduleDraw();
  });
  window.addEventListener("resize", scheduleDraw);
  window.addEventListener("hashchange", () => {
    if (view.applyHash(location.hash)) scheduleDraw();
  });

  function handleClick(sx: number, sy: number): void {
    const [gx, gy] = view.toGraph(sx, sy);
    const n = clampedLayer(ds, view.viewport);
    const rPx = nodeScreenRadius(deps);
    const pick = rPx * view.pixelSize();
    // nodes first (visible ones, then hinted/unhidden ones)
    let best: number | null = null;
    let bestD = pick * 1.5;
    for (const nd of ds.layers[n].nodes) {
      const d = Math.hypot(nd.x - gx, nd.y - gy);
      if (d < bestD) {
        bestD = d;
        best = nd.id;
      }
    }
    if (best === null) {
      for (let vid = 0; vid < ds.meta.nodes.length; vid++) {
        const nd = ds.meta.nodes[vid];
        const d = Math.hypot(nd.x - gx, nd.y - gy);
        if (d < bestD) {
          bestD = d;
          best = vid;
        }
      }
    }
    if (best !== null) {
      highlight = onNodeClick(ds, highlight, best);
      scheduleDraw();
      return;
    }
    // rails next
    const slack = 4 * view.pixelSize();
    for (const r of ds.layers[n].rails) {
      if (pointSegDist(gx, gy, r.x1, r.y1, r.x2, r.y2) < slack) {
        highlight = onRailClick(ds, highlight, r.id);
        scheduleDraw();
        return;
      }
    }
  }

  clearBtn.addEventListener("click", () => {
    highlight = emptyHighlight();
    scheduleDraw();
  });

  // --- search ---------------------------------------------------------------
  searchBox.addEventListener("input", () => {
    const hits = searchLabels(ds, searchBox.value).slice(0, 12);
    results.replaceChildren(
      ...hits.map((hit) => {
        const li = document.createElement("li");
        li.textContent = hit.label;
        li.addEventListener("click", () => {
          view.viewport = focusViewport(ds, hit.id, view.screenW / view.screenH);
          highlight = onNodeClick(ds, emptyHighlight(), hit.id);
          results.replaceChildren();
          searchBox.value = "";
          scheduleDraw();
        });
        return li;
      }),
    );
  });

  scheduleDraw();
}

function pointSegDist(px: number, py: number, ax: number, ay: number, bx: number, by: number): number {
  const vx = bx - ax;
  const vy = by - ay;
  const L2 = vx * vx + vy * vy;
  if (L2 === 0) return Math.hypot(px - ax, py - ay);
  let t = ((px - ax) * vx + (py - ay) * vy) / L2;
  t = Math.max(0, Math.min(1, t));
  return Math.hypot(px - (ax + t * vx), py - (ay + t * vy));
}

start();
