// Dataset loading over the static HTTP layout.

import type { Dataset, Meta } from "./types.js";

export async function loadDataset(base: string): Promise<Dataset> {
  const meta = (await fetchJson(`${base}/meta.json`)) as Meta;
  if (!meta.format?.startsWith("graphatlas-dataset")) {
    throw new Error(`not a graphatlas dataset at ${base}`);
  }
  const layers = [];
  for (let n = 0; n < meta.layer_count; n++) {
    const [nodes, rails] = await Promise.all([
      fetchJson(`${base}/layers/${n}/nodes.json`),
      fetchJson(`${base}/layers/${n}/rails.json`),
    ]);
    layers.push({ nodes, rails });
  }
  const [labels, routes] = await Promise.all([
    fetchJson(`${base}/labels.json`),
    fetchJson(`${base}/routes.json`),
  ]);
  return { meta, layers, labels, routes };
}

async function fetchJson(url: string): Promise<any> {
  const resp = await fetch(url);
  if (!resp.ok) throw new Error(`GET ${url}: ${resp.status}`);
  return resp.json();
}

export function tileUrl(base: string, n: number, i: number, j: number): string {
  return `${base}/tiles/${n}/${i}_${j}.png`;
}

export async function loadTileImage(url: string, signal: AbortSignal): Promise<ImageBitmap | null> {
  const resp = await fetch(url, { signal });
  if (resp.status === 404) return null;
  if (!resp.ok) throw new Error(`GET ${url}: ${resp.status}`);
  const blob = await resp.blob();
  return createImageBitmap(blob);
}
