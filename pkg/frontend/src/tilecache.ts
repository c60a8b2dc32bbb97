// Raster hint tile cache.  At most four tiles stay resident (one viewport
// never spans more); eviction is least-recently-used.  Loads run async and
// are cancelled when the viewport moves on before they land.

export const MAX_RESIDENT = 4;

export type TileKey = string; // "n/i/j"

export function tileKey(n: number, i: number, j: number): TileKey {
  return `${n}/${i}/${j}`;
}

export class TileCache<T> {
  private map = new Map<TileKey, T>();
  private loading = new Map<TileKey, AbortController>();
  readonly failed = new Set<TileKey>(); // 404s: fall back to vector hints

  constructor(private limit: number = MAX_RESIDENT) {}

  get size(): number {
    return this.map.size;
  }

  get(key: TileKey): T | undefined {
    const v = this.map.get(key);
    if (v !== undefined) {
      // refresh recency
      this.map.delete(key);
      this.map.set(key, v);
    }
    return v;
  }

  put(key: TileKey, value: T): void {
    if (this.map.has(key)) this.map.delete(key);
    this.map.set(key, value);
    while (this.map.size > this.limit) {
      const oldest = this.map.keys().next().value as TileKey;
      this.map.delete(oldest);
    }
  }

  has(key: TileKey): boolean {
    return this.map.has(key);
  }

  keys(): TileKey[] {
    return [...this.map.keys()];
  }

  /** Start an async load unless resident, already failing, or in flight. */
  ensure(key: TileKey, load: (signal: AbortSignal) => Promise<T | null>, onReady: () => void): void {
    if (this.map.has(key) || this.failed.has(key) || this.loading.has(key)) return;
    const ctrl = new AbortController();
    this.loading.set(key, ctrl);
    load(ctrl.signal)
      .then((value) => {
        if (ctrl.signal.aborted) return;
        if (value === null) this.failed.add(key);
        else this.put(key, value);
        onReady();
      })
      .catch(() => {
        /* aborted or network error: retry on a later viewport */
      })
      .finally(() => {
        if (this.loading.get(key) === ctrl) this.loading.delete(key);
      });
  }

  /** Abort every in-flight load not in the wanted set. */
  retain(wanted: Set<TileKey>): void {
    for (const [key, ctrl] of this.loading) {
      if (!wanted.has(key)) {
        ctrl.abort();
        this.loading.delete(key);
      }
    }
  }
}
