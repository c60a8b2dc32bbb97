// Viewport bookkeeping: graph<->screen transforms, pan/zoom math and the
// shareable URL hash (x,y,w,h in graph coordinates).

import type { BBox, Viewport } from "./types.js";

export class ViewState {
  viewport: Viewport;

  constructor(
    public bbox: BBox,
    public screenW: number,
    public screenH: number,
  ) {
    this.viewport = this.homeViewport();
  }

  homeViewport(): Viewport {
    // fit the whole box, preserving the screen aspect
    const aspect = this.screenW / this.screenH;
    let w = this.bbox.w;
    let h = this.bbox.h;
    if (w / h < aspect) w = h * aspect;
    else h = w / aspect;
    return {
      x: this.bbox.x + this.bbox.w / 2 - w / 2,
      y: this.bbox.y + this.bbox.h / 2 - h / 2,
      w,
      h,
    };
  }

  resize(w: number, h: number): void {
    const cx = this.viewport.x + this.viewport.w / 2;
    const cy = this.viewport.y + this.viewport.h / 2;
    const scale = this.viewport.w / this.screenW;
    this.screenW = w;
    this.screenH = h;
    this.viewport = {
      x: cx - (w * scale) / 2,
      y: cy - (h * scale) / 2,
      w: w * scale,
      h: h * scale,
    };
  }

  toScreen(gx: number, gy: number): [number, number] {
    const p = this.viewport;
    return [((gx - p.x) / p.w) * this.screenW, (1 - (gy - p.y) / p.h) * this.screenH];
  }

  toGraph(sx: number, sy: number): [number, number] {
    const p = this.viewport;
    return [p.x + (sx / this.screenW) * p.w, p.y + (1 - sy / this.screenH) * p.h];
  }

  pixelSize(): number {
    return this.viewport.w / this.screenW;
  }

  panByPixels(dx: number, dy: number): void {
    const s = this.pixelSize();
    this.viewport = {
      ...this.viewport,
      x: this.viewport.x - dx * s,
      y: this.viewport.y + dy * s,
    };
  }

  /** Zoom by a factor keeping the graph point under (sx, sy) fixed. */
  zoomAt(sx: number, sy: number, factor: number): void {
    const [gx, gy] = this.toGraph(sx, sy);
    const p = this.viewport;
    const w = p.w / factor;
    const h = p.h / factor;
    this.viewport = {
      x: gx - (sx / this.screenW) * w,
      y: gy - (1 - sy / this.screenH) * h,
      w,
      h,
    };
  }

  hash(): string {
    const p = this.viewport;
    return `#${p.x.toPrecision(9)},${p.y.toPrecision(9)},${p.w.toPrecision(9)},${p.h.toPrecision(9)}`;
  }

  applyHash(hash: string): boolean {
    const parts = hash.replace(/^#/, "").split(",").map(Number);
    if (parts.length !== 4 || parts.some((v) => !isFinite(v)) || parts[2] <= 0 || parts[3] <= 0) {
      return false;
    }
    this.viewport = { x: parts[0], y: parts[1], w: parts[2], h: parts[3] };
    return true;
  }
}
