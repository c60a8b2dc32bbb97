"""Executable quota checks over an exported dataset.

Two guarantees are checked, both stated over closed-set intersection:

* per tile: at every level n, no tile meets more than Q_N/4 nodes of L_n
  or more than Q_R/4 rails maximal among levels <= n (checked
  exhaustively over the whole tile grid);
* per viewport: for sampled viewports P, the rendered node set V_P has at
  most Q_N elements and the maximal cover of rendered rails at most Q_R.

The counting here is written against the exported files, independent of
the builder's tile bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .export import Dataset
from .geometry import Rect


def zoom_level(h: Rect, b: Rect) -> float:
    """Zoom of rectangle h relative to the graph bounds b."""
    if h.w <= 0 or h.h <= 0:
        raise ValueError("viewport must have positive extent")
    return min(b.w / h.w, b.h / h.h)


def layer_index(z: float) -> int:
    if z <= 0:
        raise ValueError("zoom must be positive")
    return max(0, int(math.floor(math.log2(z))))


def _segs_rect_mask(segs: np.ndarray, rect: Rect) -> np.ndarray:
    """Vectorized closed segment/rectangle intersection (matches the scalar
    predicate used during the build)."""
    if len(segs) == 0:
        return np.zeros(0, dtype=bool)
    x1, y1, x2, y2 = segs[:, 0], segs[:, 1], segs[:, 2], segs[:, 3]
    rx0, ry0, rx1, ry1 = rect.x, rect.y, rect.x1, rect.y1
    bbox = (
        (np.maximum(x1, x2) >= rx0)
        & (np.minimum(x1, x2) <= rx1)
        & (np.maximum(y1, y2) >= ry0)
        & (np.minimum(y1, y2) <= ry1)
    )
    out = np.zeros(len(segs), dtype=bool)
    idx = np.nonzero(bbox)[0]
    for s in idx:
        out[s] = _kernels.seg_rect_scalar(
            float(x1[s]), float(y1[s]), float(x2[s]), float(y2[s]), rx0, ry0, rx1, ry1
        )
    return out


@dataclass
class _LayerArrays:
    node_ids: np.ndarray
    node_xy: np.ndarray
    radius: float
    rail_ids: np.ndarray
    rail_segs: np.ndarray
    rail_max: np.ndarray
    rail_bbox: np.ndarray  # (m, 4) x_min, x_max, y_min, y_max


def _layer_arrays(ds: Dataset) -> list[_LayerArrays]:
    out = []
    for layer in ds.layers:
        node_ids = np.array([nd["id"] for nd in layer.nodes], dtype=np.int64)
        node_xy = np.array([[nd["x"], nd["y"]] for nd in layer.nodes], dtype=np.float64).reshape(-1, 2)
        segs = np.array(
            [[r["x1"], r["y1"], r["x2"], r["y2"]] for r in layer.rails], dtype=np.float64
        ).reshape(-1, 4)
        rail_ids = np.array([r["id"] for r in layer.rails], dtype=np.int64)
        rail_max = np.array([r["max"] for r in layer.rails], dtype=np.int64)
        bbox = np.stack(
            [
                np.minimum(segs[:, 0], segs[:, 2]),
                np.maximum(segs[:, 0], segs[:, 2]),
                np.minimum(segs[:, 1], segs[:, 3]),
                np.maximum(segs[:, 1], segs[:, 3]),
            ],
            axis=1,
        ) if len(segs) else np.zeros((0, 4))
        out.append(
            _LayerArrays(
                node_ids=node_ids,
                node_xy=node_xy,
                radius=ds.node_radius(layer.level),
                rail_ids=rail_ids,
                rail_segs=segs,
                rail_max=rail_max,
                rail_bbox=bbox,
            )
        )
    return out


def visible_set(ds: Dataset, viewport: Rect) -> tuple[list[int], list[int], list[int]]:
    """Entity ids rendered for a viewport: (nodes, rails, maximal cover).

    The layer index clamps to the deepest layer, mirroring the viewer.
    """
    arrays = _layer_arrays(ds)
    return _visible_from_arrays(ds, arrays, viewport)


def _visible_from_arrays(ds, arrays, viewport: Rect):
    z = zoom_level(viewport, ds.bbox)
    n = min(layer_index(z), ds.layer_count - 1)
    la = arrays[n]
    nodes = []
    if len(la.node_ids):
        dx = np.maximum(np.maximum(viewport.x - la.node_xy[:, 0], 0.0), la.node_xy[:, 0] - viewport.x1)
        dy = np.maximum(np.maximum(viewport.y - la.node_xy[:, 1], 0.0), la.node_xy[:, 1] - viewport.y1)
        mask = dx * dx + dy * dy <= la.radius * la.radius
        nodes = [int(v) for v in la.node_ids[mask]]
    rails = []
    rmax: list[int] = []
    if len(la.rail_ids):
        mask = _segs_rect_mask(la.rail_segs, viewport)
        rails = [int(r) for r in la.rail_ids[mask]]
        rmax = sorted(int(m) for m in np.unique(la.rail_max[mask]))
    return nodes, rails, rmax


def lemma_tile_maxima(ds: Dataset) -> dict[int, tuple[int, int]]:
    """Exhaustive per-tile maxima: {level: (max nodes, max maximal rails)}."""
    arrays = _layer_arrays(ds)
    bbox = ds.bbox
    out = {}
    max_segs: list[np.ndarray] = []
    for n, la in enumerate(arrays):
        if 2**n > 8192:
            raise MemoryError(
                f"exhaustive tile check at level {n} needs a {2**n}^2 grid; "
                "dataset is deeper than this checker supports"
            )
        # Maximal rails of levels <= n, deduplicated by rail id.
        mask = la.rail_ids == la.rail_max
        max_segs.append(la.rail_segs[mask] if len(la.rail_segs) else np.zeros((0, 4)))
        grid_n = np.zeros((2**n, 2**n), dtype=np.int32)
        grid_r = np.zeros((2**n, 2**n), dtype=np.int32)
        tw, th = bbox.w / 2**n, bbox.h / 2**n
        if len(la.node_xy):
            _kernels.count_disk_tiles(la.node_xy, la.radius, bbox.x, bbox.y, tw, th, grid_n)
        all_max = np.vstack(max_segs) if max_segs else np.zeros((0, 4))
        if len(all_max):
            _kernels.count_seg_tiles(np.ascontiguousarray(all_max), bbox.x, bbox.y, tw, th, grid_r)
        out[n] = (int(grid_n.max(initial=0)), int(grid_r.max(initial=0)))
    return out


@dataclass
class QuotaReport:
    samples: int
    seed: int
    violations: list[dict]
    lemma_maxima: dict[int, tuple[int, int]]
    lemma_ok: bool
    max_nodes_seen: int
    max_rail_cover_seen: int
    max_node_ratio: float
    max_rail_ratio: float
    forced_final: bool

    @property
    def ok(self) -> bool:
        return not self.violations and self.lemma_ok

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "seed": self.seed,
            "ok": self.ok,
            "lemma_ok": self.lemma_ok,
            "lemma_maxima": {str(k): list(v) for k, v in self.lemma_maxima.items()},
            "violations": self.violations,
            "max_nodes_seen": self.max_nodes_seen,
            "max_rail_cover_seen": self.max_rail_cover_seen,
            "max_node_ratio": self.max_node_ratio,
            "max_rail_ratio": self.max_rail_ratio,
            "forced_final": self.forced_final,
        }


def sample_viewports(ds: Dataset, samples: int, seed: int) -> list[Rect]:
    """Log-uniform zoom in [0.25, 2^(k+2)], centers uniform over 1.5x bbox,
    random aspect; covers clamped layers and panning past the edge."""
    rng = np.random.default_rng(seed)
    b = ds.bbox
    k = ds.layer_count - 1
    lo, hi = math.log(0.25), math.log(2.0 ** (k + 2))
    out = []
    for _ in range(samples):
        z = math.exp(rng.uniform(lo, hi))
        aspect = math.exp(rng.uniform(math.log(0.5), math.log(2.0)))
        w = b.w / z * aspect
        h = b.h / z
        cx = b.x + b.w / 2 + (rng.uniform(-0.75, 0.75)) * b.w
        cy = b.y + b.h / 2 + (rng.uniform(-0.75, 0.75)) * b.h
        out.append(Rect(cx - w / 2, cy - h / 2, w, h))
    return out


def verify_quotas(ds: Dataset, samples: int = 10000, seed: int = 7) -> QuotaReport:
    """Check the per-tile lemma exhaustively and the viewport bound on
    sampled viewports.  A forced final layer is exempt from the lemma but
    still reported."""
    arrays = _layer_arrays(ds)
    qn, qr = int(ds.meta["qn"]), int(ds.meta["qr"])
    forced = bool(ds.meta["forced_final"])
    k = ds.layer_count - 1

    maxima = lemma_tile_maxima(ds)
    lemma_ok = True
    for n, (nmax, rmax) in maxima.items():
        if forced and n == k:
            continue
        if nmax > qn // 4 or rmax > qr // 4:
            lemma_ok = False

    violations: list[dict] = []
    best_n = best_r = 0
    for vp in sample_viewports(ds, samples, seed):
        z = zoom_level(vp, ds.bbox)
        n_raw = layer_index(z)
        nodes, rails, rmax = _visible_from_arrays(ds, arrays, vp)
        best_n = max(best_n, len(nodes))
        best_r = max(best_r, len(rmax))
        exempt = forced and min(n_raw, k) == k
        if (len(nodes) > qn or len(rmax) > qr) and not exempt:
            violations.append(
                {
                    "viewport": [vp.x, vp.y, vp.w, vp.h],
                    "layer": min(n_raw, k),
                    "nodes": len(nodes),
                    "rail_cover": len(rmax),
                }
            )
        if n_raw >= 1:
            # The geometric core of the viewport theorem: P spans <= 4 tiles.
            tiles = _tiles_touched(ds.bbox, vp, n_raw)
            if tiles > 4:
                violations.append(
                    {
                        "viewport": [vp.x, vp.y, vp.w, vp.h],
                        "layer": n_raw,
                        "tiles": tiles,
                        "kind": "tile-span",
                    }
                )
    return QuotaReport(
        samples=samples,
        seed=seed,
        violations=violations,
        lemma_maxima=maxima,
        lemma_ok=lemma_ok,
        max_nodes_seen=best_n,
        max_rail_cover_seen=best_r,
        max_node_ratio=best_n / qn,
        max_rail_ratio=best_r / qr,
        forced_final=forced,
    )


def _tiles_touched(bbox: Rect, vp: Rect, level: int) -> int:
    tw, th = bbox.w / 2**level, bbox.h / 2**level
    ja = max(int(math.floor((vp.x - bbox.x) / tw)), 0)
    jb = int(math.floor((vp.x1 - bbox.x) / tw))
    ia = max(int(math.floor((vp.y - bbox.y) / th)), 0)
    ib = int(math.floor((vp.y1 - bbox.y) / th))
    if jb < ja or ib < ia:
        return 0
    return (jb - ja + 1) * (ib - ia + 1)


def check_route_completeness(ds: Dataset) -> list[str]:
    """Every edge whose endpoints are both in a layer must be realized by a
    connected chain of that layer's rails between its route endpoints."""
    problems = []
    z = {nd["id"]: nd["z"] for layer in ds.layers for nd in layer.nodes}
    for layer in ds.layers:
        n = layer.level
        # Rail connectivity graph keyed by exact endpoint coordinates.
        by_edge: dict[int, list[dict]] = {}
        for r in layer.rails:
            for eid in r["edges"]:
                by_edge.setdefault(eid, []).append(r)
        for eid_str, route in ds.routes.items():
            eid = int(eid_str)
            u, v = ds.meta["edges"][eid]
            if z.get(u, 99) > n or z.get(v, 99) > n:
                continue
            rails = by_edge.get(eid, [])
            if not rails:
                problems.append(f"layer {n}: edge {eid} has no rails")
                continue
            adj: dict[tuple[float, float], list[int]] = {}
            for i, r in enumerate(rails):
                adj.setdefault((r["x1"], r["y1"]), []).append(i)
                adj.setdefault((r["x2"], r["y2"]), []).append(i)
            pts = route["points"]
            start = (pts[0][0], pts[0][1])
            goal = (pts[-1][0], pts[-1][1])
            if start not in adj or goal not in adj:
                problems.append(f"layer {n}: edge {eid} attachment not on any rail")
                continue
            seen_r = set()
            frontier = [start]
            reach = {start}
            while frontier:
                p = frontier.pop()
                for i in adj.get(p, ()):
                    if i in seen_r:
                        continue
                    seen_r.add(i)
                    r = rails[i]
                    for q in ((r["x1"], r["y1"]), (r["x2"], r["y2"])):
                        if q not in reach:
                            reach.add(q)
                            frontier.append(q)
            if goal not in reach:
                problems.append(f"layer {n}: edge {eid} rails disconnected between endpoints")
    return problems


def check_stability(ds: Dataset, tol_rel: float = 1e-9) -> list[str]:
    """Rail point sets must be carried forward; node positions identical."""
    problems = []
    tol = tol_rel * ds.bbox.diag
    pos = {}
    for layer in ds.layers:
        for nd in layer.nodes:
            key = nd["id"]
            if key in pos:
                if pos[key] != (nd["x"], nd["y"]):
                    problems.append(f"node {key} moved between layers")
            else:
                pos[key] = (nd["x"], nd["y"])
    for prev, cur in zip(ds.layers, ds.layers[1:]):
        segs = np.array(
            [[r["x1"], r["y1"], r["x2"], r["y2"]] for r in cur.rails], dtype=np.float64
        ).reshape(-1, 4)
        grid = _CoverGrid(segs, tol) if len(segs) else None
        for r in prev.rails:
            if grid is None or not grid.covered(r["x1"], r["y1"], r["x2"], r["y2"]):
                problems.append(
                    f"layer {cur.level}: rail {r['id']} of layer {prev.level} not covered"
                )
    return problems


class _CoverGrid:
    """Point-set coverage: is a segment covered by the union of others?

    Samples the target segment at every subdivision breakpoint and checks
    each sub-piece's midpoint lies on some covering segment.
    """

    def __init__(self, segs: np.ndarray, tol: float):
        self.segs = segs
        self.tol = tol
        lo = min(segs[:, 0].min(), segs[:, 2].min()), min(segs[:, 1].min(), segs[:, 3].min())
        hi = max(segs[:, 0].max(), segs[:, 2].max()), max(segs[:, 1].max(), segs[:, 3].max())
        self.cell = max(hi[0] - lo[0], hi[1] - lo[1], tol) / 128.0
        self.lo = lo
        self.cells: dict[tuple[int, int], list[int]] = {}
        for i, (x1, y1, x2, y2) in enumerate(segs):
            ja, jb = sorted((int((x1 - lo[0]) // self.cell), int((x2 - lo[0]) // self.cell)))
            ia, ib = sorted((int((y1 - lo[1]) // self.cell), int((y2 - lo[1]) // self.cell)))
            for ii in range(ia, ib + 1):
                for jj in range(ja, jb + 1):
                    self.cells.setdefault((ii, jj), []).append(i)

    def _near(self, x: float, y: float) -> list[int]:
        jj = int((x - self.lo[0]) // self.cell)
        ii = int((y - self.lo[1]) // self.cell)
        out = []
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                out.extend(self.cells.get((ii + di, jj + dj), ()))
        return out

    def covered(self, x1, y1, x2, y2) -> bool:
        from .geometry import point_seg_dist

        # Breakpoints: endpoints of covering segments projected onto the target.
        ts = [0.0, 1.0]
        dx, dy = x2 - x1, y2 - y1
        L2 = dx * dx + dy * dy
        if L2 == 0:
            return True
        cands: set[int] = set()
        steps = max(int(math.hypot(dx, dy) / self.cell) * 2, 2)
        for s in range(steps + 1):
            t = s / steps
            cands.update(self._near(x1 + t * dx, y1 + t * dy))
        for i in cands:
            for px, py in ((self.segs[i, 0], self.segs[i, 1]), (self.segs[i, 2], self.segs[i, 3])):
                t = ((px - x1) * dx + (py - y1) * dy) / L2
                if 0.0 < t < 1.0:
                    ts.append(t)
        ts.sort()
        for a, b in zip(ts, ts[1:]):
            mx, my = x1 + (a + b) / 2 * dx, y1 + (a + b) / 2 * dy
            ok = False
            for i in self._near(mx, my):
                if point_seg_dist(mx, my, *self.segs[i]) <= self.tol:
                    ok = True
                    break
            if not ok:
                return False
        return True
