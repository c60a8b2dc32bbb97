"""Constrained triangulation over node boundary polygons and fixed segments.

The triangulation starts from an unconstrained Delaunay triangulation
(scipy/Qhull) and enforces every input segment by cavity retriangulation,
so that each input segment is traceable as a chain of mesh edges.  Every
mesh edge lying on an input segment records which segments cover it; the
layering code uses that provenance to carry rails forward exactly.

Optional Ruppert-style refinement improves triangle quality by splitting
encroached segments and inserting circumcenters of skinny triangles.  It
is off by default: routing only needs the constrained triangulation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import Delaunay

from .geometry import (
    NodeBoundary,
    orient,
    point_seg_dist,
    seg_seg_properly_cross,
    snap,
)


class MeshError(Exception):
    pass


class ConstraintCrossingError(MeshError):
    """Two input segments cross somewhere other than a shared endpoint."""

    def __init__(self, seg_a: str, seg_b: str):
        self.seg_a = seg_a
        self.seg_b = seg_b
        super().__init__(f"constraint segments cross: {seg_a} x {seg_b}")


@dataclass(frozen=True)
class InputSegment:
    """A segment the triangulation must preserve (possibly subdivided)."""

    cid: int
    ax: float
    ay: float
    bx: float
    by: float
    kind: str  # "boundary" or "rail"
    ref: object = None

    def describe(self) -> str:
        return f"{self.kind}[{self.cid}] ({self.ax:.6g},{self.ay:.6g})-({self.bx:.6g},{self.by:.6g})"


@dataclass
class Mesh:
    """Finalized constrained triangulation.

    Edge indices are assigned in sorted (a, b) vertex-id order, which makes
    the whole structure deterministic for a fixed input.
    """

    verts: np.ndarray  # (nv, 2)
    edge_verts: np.ndarray  # (ne, 2) int64, a < b
    edge_len: np.ndarray  # (ne,)
    edge_constrained: np.ndarray  # (ne,) bool
    edge_routable: np.ndarray  # (ne,) bool; False strictly inside a boundary polygon
    triangles: np.ndarray  # (nt, 3) int64
    segments: list[InputSegment]
    edge_cover: dict[int, tuple[int, ...]]  # edge idx -> covering segment cids
    segment_children: dict[int, tuple[int, ...]]  # cid -> edge indices
    boundary_corners: list[np.ndarray] = field(default_factory=list)  # per boundary, vertex ids
    vert_index: dict[tuple[float, float], int] = field(default_factory=dict)
    snap_eps: float = 0.0

    @property
    def edge_index(self) -> dict[tuple[int, int], int]:
        if not hasattr(self, "_edge_index"):
            self._edge_index = {(int(a), int(b)): i for i, (a, b) in enumerate(self.edge_verts)}
        return self._edge_index

    def edge_id(self, a: int, b: int) -> int:
        key = (a, b) if a < b else (b, a)
        return self.edge_index[key]

    def csr(self, routable_only: bool = True):
        """Adjacency in CSR form; neighbor lists sorted by vertex id."""
        nv = len(self.verts)
        pairs = []
        for e, (a, b) in enumerate(self.edge_verts):
            if routable_only and not self.edge_routable[e]:
                continue
            pairs.append((int(a), int(b), e))
            pairs.append((int(b), int(a), e))
        pairs.sort()
        indptr = np.zeros(nv + 1, dtype=np.int64)
        adj_vert = np.empty(len(pairs), dtype=np.int64)
        adj_edge = np.empty(len(pairs), dtype=np.int64)
        for k, (v, u, e) in enumerate(pairs):
            indptr[v + 1] += 1
            adj_vert[k] = u
            adj_edge[k] = e
        np.cumsum(indptr, out=indptr)
        return indptr, adj_vert, adj_edge

    def to_svg(self, path: str, width: int = 800) -> None:
        """Debug rendering of the mesh; constrained edges drawn bold."""
        xs, ys = self.verts[:, 0], self.verts[:, 1]
        x0, y0, x1, y1 = xs.min(), ys.min(), xs.max(), ys.max()
        span = max(x1 - x0, y1 - y0) or 1.0
        s = width / span

        def tx(x, y):
            return (x - x0) * s, (y1 - y) * s

        lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{width}">']
        for e, (a, b) in enumerate(self.edge_verts):
            (px, py), (qx, qy) = tx(*self.verts[a]), tx(*self.verts[b])
            style = 'stroke="black" stroke-width="1.5"' if self.edge_constrained[e] else 'stroke="#bbb" stroke-width="0.5"'
            lines.append(f'<line x1="{px:.2f}" y1="{py:.2f}" x2="{qx:.2f}" y2="{qy:.2f}" {style}/>')
        lines.append("</svg>")
        with open(path, "w") as f:
            f.write("\n".join(lines))


class _Builder:
    """Mutable triangulation state during construction."""

    def __init__(self, pts: np.ndarray, snap_tol: float):
        self.pts: list[np.ndarray] = [p for p in pts]
        self.snap_tol = snap_tol
        self.tris: dict[int, tuple[int, int, int]] = {}
        self.edge_tris: dict[tuple[int, int], set[int]] = {}
        self.vert_tris: dict[int, set[int]] = {}
        self.constrained: set[tuple[int, int]] = set()
        self.cover: dict[tuple[int, int], list[int]] = {}
        self._next_tri = 0

    # -- basic topology ops ------------------------------------------------

    @staticmethod
    def _ekey(a: int, b: int) -> tuple[int, int]:
        return (a, b) if a < b else (b, a)

    def add_tri(self, a: int, b: int, c: int) -> int:
        if orient(*self.pts[a], *self.pts[b], *self.pts[c]) < 0:
            b, c = c, b
        tid = self._next_tri
        self._next_tri += 1
        self.tris[tid] = (a, b, c)
        for u, v in ((a, b), (b, c), (c, a)):
            self.edge_tris.setdefault(self._ekey(u, v), set()).add(tid)
        for v in (a, b, c):
            self.vert_tris.setdefault(v, set()).add(tid)
        return tid

    def remove_tri(self, tid: int) -> None:
        a, b, c = self.tris.pop(tid)
        for u, v in ((a, b), (b, c), (c, a)):
            key = self._ekey(u, v)
            ts = self.edge_tris[key]
            ts.discard(tid)
            if not ts:
                del self.edge_tris[key]
        for v in (a, b, c):
            self.vert_tris[v].discard(tid)

    def has_edge(self, a: int, b: int) -> bool:
        return self._ekey(a, b) in self.edge_tris

    def mark_constrained(self, a: int, b: int, cid: int) -> None:
        key = self._ekey(a, b)
        self.constrained.add(key)
        ids = self.cover.setdefault(key, [])
        if cid not in ids:
            ids.append(cid)

    # -- constraint insertion ----------------------------------------------

    def insert_constraint(self, a: int, b: int, cid: int, describe) -> None:
        if a == b:
            return
        if self.has_edge(a, b):
            self.mark_constrained(a, b, cid)
            return
        crossed_tris, crossed_edges, upper, lower = self._march(a, b, cid, describe)
        for tid in crossed_tris:
            self.remove_tri(tid)
        self._fill_pseudo(upper, a, b)
        self._fill_pseudo(lower, a, b)
        if not self.has_edge(a, b):
            raise MeshError(f"constraint enforcement failed for {describe(cid)}")
        self.mark_constrained(a, b, cid)

    def _march(self, a: int, b: int, cid: int, describe):
        pa, pb = self.pts[a], self.pts[b]
        start = None
        for tid in sorted(self.vert_tris[a]):
            x, y = [v for v in self.tris[tid] if v != a]
            if seg_seg_properly_cross(pa, pb, self.pts[x], self.pts[y]):
                start = (tid, (x, y))
                break
        if start is None:
            raise MeshError(
                f"cannot trace constraint {describe(cid)}: no exit triangle at vertex {a}"
            )
        tid, edge = start
        if self._ekey(*edge) in self.constrained:
            other = self.cover[self._ekey(*edge)][0]
            raise ConstraintCrossingError(describe(cid), describe(other))
        crossed_tris = [tid]
        crossed_edges = [self._ekey(*edge)]
        upper, lower = [], []
        for w in edge:
            side = orient(*pa, *pb, *self.pts[w])
            if side == 0:
                raise MeshError(f"vertex {w} lies on constraint {describe(cid)}")
            (upper if side > 0 else lower).append(w)

        while True:
            nxt = self.edge_tris[crossed_edges[-1]] - {crossed_tris[-1]}
            if not nxt:
                raise MeshError(f"constraint {describe(cid)} leaves the triangulation")
            tid = nxt.pop()
            crossed_tris.append(tid)
            tri = self.tris[tid]
            if b in tri:
                return crossed_tris, crossed_edges, upper, lower
            w = next(v for v in tri if v not in crossed_edges[-1])
            side = orient(*pa, *pb, *self.pts[w])
            if side == 0:
                raise MeshError(f"vertex {w} lies on constraint {describe(cid)}")
            (upper if side > 0 else lower).append(w)
            u, v = crossed_edges[-1]
            nxt_edge = None
            for cand in ((w, u), (w, v)):
                if seg_seg_properly_cross(pa, pb, self.pts[cand[0]], self.pts[cand[1]]):
                    nxt_edge = self._ekey(*cand)
                    break
            if nxt_edge is None:
                raise MeshError(f"march stalled on constraint {describe(cid)}")
            if nxt_edge in self.constrained:
                other = self.cover[nxt_edge][0]
                raise ConstraintCrossingError(describe(cid), describe(other))
            crossed_edges.append(nxt_edge)

    def _fill_pseudo(self, chain: list[int], a: int, b: int) -> None:
        """Retriangulate one side of a carved channel (Anglada's method)."""
        if not chain:
            return
        if len(chain) == 1:
            self.add_tri(a, chain[0], b)
            return
        ci = 0
        pa, pb = self.pts[a], self.pts[b]
        for i, c in enumerate(chain):
            ok = True
            for j, d in enumerate(chain):
                if j != i and self._in_circumcircle(pa, pb, self.pts[c], self.pts[d]):
                    ok = False
                    break
            if ok:
                ci = i
                break
        c = chain[ci]
        self.add_tri(a, c, b)
        self._fill_pseudo(chain[:ci], a, c)
        self._fill_pseudo(chain[ci + 1 :], c, b)

    @staticmethod
    def _in_circumcircle(pa, pb, pc, pd) -> bool:
        # Strictly inside the circumcircle of (pa, pb, pc); sign-normalized.
        ax, ay = pa[0] - pd[0], pa[1] - pd[1]
        bx, by = pb[0] - pd[0], pb[1] - pd[1]
        cx, cy = pc[0] - pd[0], pc[1] - pd[1]
        det = (
            (ax * ax + ay * ay) * (bx * cy - cx * by)
            - (bx * bx + by * by) * (ax * cy - cx * ay)
            + (cx * cx + cy * cy) * (ax * by - bx * ay)
        )
        o = orient(pa[0], pa[1], pb[0], pb[1], pc[0], pc[1])
        if o < 0:
            det = -det
        return det > 0

    # -- vertex insertion (refinement) ---------------------------------------

    def locate(self, px: float, py: float, hint: int) -> int:
        """Triangle containing (px, py), by straight walk from a hint vertex."""
        cur = None
        for tid in sorted(self.vert_tris.get(hint, ())):
            cur = tid
            break
        if cur is None:
            raise MeshError("locate: empty triangulation")
        seen = set()
        while True:
            if cur in seen:
                raise MeshError("locate: walk cycled")
            seen.add(cur)
            a, b, c = self.tris[cur]
            nxt = None
            for u, v in ((a, b), (b, c), (c, a)):
                if orient(*self.pts[u], *self.pts[v], px, py) < 0:
                    across = self.edge_tris[self._ekey(u, v)] - {cur}
                    if not across:
                        raise MeshError("locate: point outside triangulation")
                    nxt = across.pop()
                    break
            if nxt is None:
                return cur
            cur = nxt

    def insert_point(self, px: float, py: float, hint: int, clearance: float = 0.0) -> int:
        """Bowyer-Watson insertion; the cavity never crosses constrained edges.

        With a positive clearance, points closer than that to the located
        triangle's vertices or edges are rejected (prevents degenerate
        slivers); callers split the edge instead.
        """
        t0 = self.locate(px, py, hint)
        if clearance > 0.0:
            a, b, c = self.tris[t0]
            for v in (a, b, c):
                if math.hypot(self.pts[v][0] - px, self.pts[v][1] - py) < clearance:
                    raise MeshError("insertion point too close to an existing vertex")
            for u, v in ((a, b), (b, c), (c, a)):
                if (
                    point_seg_dist(px, py, self.pts[u][0], self.pts[u][1], self.pts[v][0], self.pts[v][1])
                    < clearance
                ):
                    raise MeshError("insertion point too close to an existing edge")
        vid = len(self.pts)
        self.pts.append(np.array([px, py]))
        cavity = {t0}
        stack = [t0]
        while stack:
            tid = stack.pop()
            a, b, c = self.tris[tid]
            for u, v in ((a, b), (b, c), (c, a)):
                key = self._ekey(u, v)
                if key in self.constrained:
                    continue
                for nb in self.edge_tris[key] - {tid}:
                    if nb in cavity:
                        continue
                    ta, tb, tc = self.tris[nb]
                    if self._in_circumcircle(self.pts[ta], self.pts[tb], self.pts[tc], self.pts[vid]):
                        cavity.add(nb)
                        stack.append(nb)
        while True:
            boundary = []
            grow = None
            for tid in cavity:
                a, b, c = self.tris[tid]
                for u, v in ((a, b), (b, c), (c, a)):
                    key = self._ekey(u, v)
                    others = self.edge_tris[key] - cavity
                    if others or len(self.edge_tris[key]) == 1:
                        o = orient(*self.pts[u], *self.pts[v], px, py)
                        if o == 0.0:
                            # The point sits exactly on this edge.  The
                            # neighbor across it must be retriangulated too,
                            # or there is no valid star at all.
                            if not others:
                                self.pts.pop()
                                raise MeshError("insertion point lies on a hull edge")
                            if key in self.constrained:
                                self.pts.pop()
                                raise MeshError("insertion point lies on a constrained edge")
                            grow = next(iter(others))
                            break
                        boundary.append((u, v) if o > 0 else (v, u))
                if grow is not None:
                    break
            if grow is None:
                break
            cavity.add(grow)
        for tid in list(cavity):
            self.remove_tri(tid)
        for u, v in boundary:
            self.add_tri(u, v, vid)
        return vid

    def blocking_constraint(self, tid: int, px: float, py: float) -> tuple[int, int] | None:
        """First constrained edge crossed walking from triangle tid toward
        (px, py), or None when the point is reachable."""
        cur = tid
        seen: set[int] = set()
        while True:
            if cur in seen:
                return None
            seen.add(cur)
            a, b, c = self.tris[cur]
            nxt = None
            for u, v in ((a, b), (b, c), (c, a)):
                if orient(*self.pts[u], *self.pts[v], px, py) < 0:
                    nxt = (u, v)
                    break
            if nxt is None:
                return None
            key = self._ekey(*nxt)
            if key in self.constrained:
                return key
            across = self.edge_tris[key] - {cur}
            if not across:
                return None
            cur = across.pop()

    def split_edge(self, key: tuple[int, int]) -> int:
        """Insert the midpoint of an edge by direct topology surgery; halves
        of a constrained edge inherit its covering segments."""
        a, b = key
        cids = self.cover.pop(key, None)
        was_constrained = key in self.constrained
        self.constrained.discard(key)
        mx = (self.pts[a][0] + self.pts[b][0]) * 0.5
        my = (self.pts[a][1] + self.pts[b][1]) * 0.5
        vid = len(self.pts)
        self.pts.append(np.array([mx, my]))
        for tid in sorted(self.edge_tris.get(key, ())):
            ta, tb, tc = self.tris[tid]
            w = next(v for v in (ta, tb, tc) if v not in key)
            self.remove_tri(tid)
            self.add_tri(a, w, vid)
            self.add_tri(w, b, vid)
        if was_constrained:
            for half in ((a, vid), (vid, b)):
                hk = self._ekey(*half)
                self.constrained.add(hk)
                self.cover[hk] = list(cids)
        self._lawson(vid)
        return vid

    # kept under the older name for the constrained case
    split_constrained_edge = split_edge

    def _lawson(self, vid: int) -> None:
        """Flip propagation restoring the Delaunay property around vid."""
        stack = []
        for tid in self.vert_tris[vid]:
            a, b, c = self.tris[tid]
            others = [v for v in (a, b, c) if v != vid]
            stack.append(self._ekey(*others))
        guard = 0
        while stack:
            guard += 1
            if guard > 100000:
                raise MeshError("flip propagation did not terminate")
            key = stack.pop()
            if key in self.constrained or key not in self.edge_tris:
                continue
            ts = self.edge_tris[key]
            if len(ts) != 2:
                continue
            t1, t2 = sorted(ts)
            a, b = key
            c = next(v for v in self.tris[t1] if v not in key)
            d = next(v for v in self.tris[t2] if v not in key)
            if not self._in_circumcircle(self.pts[a], self.pts[b], self.pts[c], self.pts[d]):
                continue
            # Flip only strictly convex quads.
            if orient(*self.pts[c], *self.pts[d], *self.pts[a]) == 0 or orient(
                *self.pts[c], *self.pts[d], *self.pts[b]
            ) == 0:
                continue
            if (orient(*self.pts[c], *self.pts[d], *self.pts[a]) > 0) == (
                orient(*self.pts[c], *self.pts[d], *self.pts[b]) > 0
            ):
                continue
            self.remove_tri(t1)
            self.remove_tri(t2)
            self.add_tri(c, d, a)
            self.add_tri(c, d, b)
            for e in ((a, c), (c, b), (b, d), (d, a)):
                stack.append(self._ekey(*e))


def _dedupe_points(arrs: list[np.ndarray]) -> tuple[np.ndarray, dict[tuple[float, float], int]]:
    index: dict[tuple[float, float], int] = {}
    out: list[tuple[float, float]] = []
    for arr in arrs:
        for x, y in arr:
            key = (float(x), float(y))
            if key not in index:
                index[key] = len(out)
                out.append(key)
    return np.array(out, dtype=np.float64), index


def generate_mesh(
    boundaries: list[NodeBoundary],
    fixed_segments: list[InputSegment],
    snap_eps: float,
    min_angle: float = 20.0,
    refine: bool = False,
) -> Mesh:
    """Constrained triangulation of boundary polygons plus fixed segments.

    Raises ConstraintCrossingError when two input segments cross anywhere
    except a shared endpoint, and MeshError on degenerate input.
    """
    boundaries = [NodeBoundary(nb.center, nb.radius, snap(nb.polygon, snap_eps)) for nb in boundaries]
    segments: list[InputSegment] = []
    for bi, nb in enumerate(boundaries):
        poly = nb.polygon
        k = len(poly)
        for s in range(k):
            ax, ay = poly[s]
            bx, by = poly[(s + 1) % k]
            segments.append(
                InputSegment(len(segments), float(ax), float(ay), float(bx), float(by), "boundary", (bi, s))
            )
    for seg in fixed_segments:
        a = snap(np.array([[seg.ax, seg.ay]]), snap_eps)[0]
        b = snap(np.array([[seg.bx, seg.by]]), snap_eps)[0]
        segments.append(
            InputSegment(len(segments), float(a[0]), float(a[1]), float(b[0]), float(b[1]), seg.kind, seg.ref)
        )

    point_arrays = [nb.polygon for nb in boundaries]
    if segments:
        seg_pts = np.array([[s.ax, s.ay] for s in segments] + [[s.bx, s.by] for s in segments])
        point_arrays.append(seg_pts)
    if not point_arrays:
        raise MeshError("no input geometry")

    if refine:
        # Refinement needs a constrained outer boundary, otherwise hull
        # slivers have no legal circumcenter.  The snapped bounding
        # rectangle of the input serves as that frame.
        all_pts = np.vstack(point_arrays)
        x0, y0 = all_pts[:, 0].min(), all_pts[:, 1].min()
        x1, y1 = all_pts[:, 0].max(), all_pts[:, 1].max()
        frame = snap(np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]]), snap_eps)
        for k in range(4):
            ax, ay = frame[k]
            bx, by = frame[(k + 1) % 4]
            if ax == bx and ay == by:
                continue
            segments.append(
                InputSegment(len(segments), float(ax), float(ay), float(bx), float(by), "frame", k)
            )
        point_arrays.append(frame)

    pts, vert_index = _dedupe_points(point_arrays)
    if len(pts) < 3:
        raise MeshError("need at least 3 distinct points")

    dt = Delaunay(pts)
    used = np.zeros(len(pts), dtype=bool)
    used[dt.simplices.ravel()] = True
    if not used.all():
        raise MeshError(f"{int((~used).sum())} input points excluded by triangulation (degenerate input)")

    builder = _Builder(pts, snap_eps)
    for a, b, c in dt.simplices:
        if orient(*pts[a], *pts[b], *pts[c]) == 0.0:
            continue
        builder.add_tri(int(a), int(b), int(c))

    def describe(cid: int) -> str:
        return segments[cid].describe()

    grid = _PointGrid(pts)
    tol = snap_eps
    for seg in segments:
        a = vert_index[(seg.ax, seg.ay)]
        b = vert_index[(seg.bx, seg.by)]
        stops = [a]
        for vid in grid.on_segment(seg.ax, seg.ay, seg.bx, seg.by, tol, builder):
            if vid not in (a, b):
                stops.append(vid)
        stops.sort(key=lambda v: (builder.pts[v][0] - seg.ax) ** 2 + (builder.pts[v][1] - seg.ay) ** 2)
        stops.append(b)
        for u, v in zip(stops, stops[1:]):
            builder.insert_constraint(u, v, seg.cid, describe)

    if refine:
        _refine(builder, min_angle, snap_eps)

    return _finalize(builder, segments, boundaries, vert_index, snap_eps)


class _PointGrid:
    """Uniform hash grid for locating vertices near a segment."""

    def __init__(self, pts: np.ndarray):
        lo = pts.min(axis=0)
        hi = pts.max(axis=0)
        span = float(max(hi[0] - lo[0], hi[1] - lo[1])) or 1.0
        self.cell = span / 256.0
        self.lo = lo
        self.cells: dict[tuple[int, int], list[int]] = {}
        for i, (x, y) in enumerate(pts):
            self.cells.setdefault(self._key(x, y), []).append(i)

    def _key(self, x: float, y: float) -> tuple[int, int]:
        return (int((x - self.lo[0]) // self.cell), int((y - self.lo[1]) // self.cell))

    def on_segment(self, ax, ay, bx, by, tol, builder) -> list[int]:
        length = math.hypot(bx - ax, by - ay)
        n = max(int(length / self.cell) * 2 + 1, 1)
        seen: set[tuple[int, int]] = set()
        found: list[int] = []
        for s in range(n + 1):
            t = s / n
            cx, cy = ax + t * (bx - ax), ay + t * (by - ay)
            kx, ky = self._key(cx, cy)
            for dx in (-1, 0, 1):
                for dy in (-1, 0, 1):
                    key = (kx + dx, ky + dy)
                    if key in seen or key not in self.cells:
                        continue
                    seen.add(key)
                    for vid in self.cells[key]:
                        px, py = builder.pts[vid][0], builder.pts[vid][1]
                        if (px == ax and py == ay) or (px == bx and py == by):
                            continue
                        if point_seg_dist(px, py, ax, ay, bx, by) <= tol:
                            found.append(vid)
        return found


def _refine(builder: _Builder, min_angle: float, snap_eps: float) -> None:
    """Ruppert-style refinement driven by a worst-first priority queue.

    Encroached constrained edges are split first; skinny triangles are then
    fixed largest-circumradius-first by circumcenter insertion, redirected
    to segment splits whenever the center would encroach one.  A length
    floor and an occupancy grid stop pathological cascades; if anything
    skinny above the floor survives the budget, this raises instead of
    returning a mesh that misses the promised bound.
    """
    import heapq
    from collections import deque

    # Floor relative to the smallest input feature: splitting far below it
    # only manufactures snap-scale debris.
    feature = math.inf
    for key in builder.constrained:
        a, b = key
        feature = min(
            feature,
            math.hypot(builder.pts[a][0] - builder.pts[b][0], builder.pts[a][1] - builder.pts[b][1]),
        )
    if not math.isfinite(feature):
        feature = 1.0
    min_len = max(snap_eps * 64.0, feature / 16.0)
    sin_bound = math.sin(math.radians(min_angle))
    budget = 200000

    def seg_len2(key) -> float:
        a, b = key
        return (builder.pts[a][0] - builder.pts[b][0]) ** 2 + (builder.pts[a][1] - builder.pts[b][1]) ** 2

    def encroached_by_neighbors(key: tuple[int, int]) -> bool:
        a, b = key
        pa, pb = builder.pts[a], builder.pts[b]
        cx, cy = (pa[0] + pb[0]) * 0.5, (pa[1] + pb[1]) * 0.5
        r2 = ((pa[0] - pb[0]) ** 2 + (pa[1] - pb[1]) ** 2) * 0.25
        for tid in builder.edge_tris.get(key, ()):
            for w in builder.tris[tid]:
                if w in key:
                    continue
                d2 = (builder.pts[w][0] - cx) ** 2 + (builder.pts[w][1] - cy) ** 2
                if d2 < r2 * (1.0 - 1e-12):
                    return True
        return False

    def skinny_sin(tid: int) -> tuple[float, float]:
        a, b, c = builder.tris[tid]
        pa, pb, pc = builder.pts[a], builder.pts[b], builder.pts[c]
        la, lb, lc = math.dist(pb, pc), math.dist(pa, pc), math.dist(pa, pb)
        if la * lb * lc == 0.0:
            return 1.0, 0.0
        area2 = abs(orient(*pa, *pb, *pc))
        return min(area2 / (lb * lc), area2 / (la * lc), area2 / (la * lb)), min(la, lb, lc)

    def circumradius2(tid: int) -> float:
        a, b, c = builder.tris[tid]
        pa, pb, pc = builder.pts[a], builder.pts[b], builder.pts[c]
        area2 = abs(orient(*pa, *pb, *pc))
        if area2 == 0.0:
            return math.inf
        la2 = (pb[0] - pc[0]) ** 2 + (pb[1] - pc[1]) ** 2
        lb2 = (pa[0] - pc[0]) ** 2 + (pa[1] - pc[1]) ** 2
        lc2 = (pa[0] - pb[0]) ** 2 + (pa[1] - pb[1]) ** 2
        return la2 * lb2 * lc2 / (4.0 * area2 * area2)

    # Duplicate suppression near the snap scale only; spacing is governed
    # by the clearance and the length floor, not by this grid.
    occ_cell = snap_eps * 8.0
    occupied: set[tuple[int, int]] = set()

    def occupy(px: float, py: float) -> bool:
        key = (int(round(px / occ_cell)), int(round(py / occ_cell)))
        if key in occupied:
            return False
        occupied.add(key)
        return True

    for p in builder.pts:
        occupy(p[0], p[1])

    seg_queue = deque(sorted(builder.constrained))
    tri_heap: list[tuple[float, int]] = []

    def push_tri(tid: int) -> None:
        s, shortest = skinny_sin(tid)
        if s < sin_bound and shortest > min_len:
            heapq.heappush(tri_heap, (-circumradius2(tid), tid))

    for tid in sorted(builder.tris):
        push_tri(tid)

    def split_segment(key) -> int | None:
        if key not in builder.constrained or key not in builder.edge_tris:
            return None
        if seg_len2(key) <= min_len * min_len:
            return None
        return builder.split_edge(key)

    def after_insert(vid: int) -> None:
        occupy(builder.pts[vid][0], builder.pts[vid][1])
        for tid in builder.vert_tris.get(vid, ()):
            push_tri(tid)
            t = builder.tris[tid]
            for u, v in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                key = builder._ekey(u, v)
                if key in builder.constrained:
                    seg_queue.append(key)

    def exempt_small_input_angle(tid: int) -> bool:
        # A triangle wedged into two constraints meeting at an acute angle
        # cannot be improved by any refinement (classic Ruppert caveat).
        tri = builder.tris[tid]
        for v in tri:
            nbrs: set[int] = set()
            for t2 in builder.vert_tris.get(v, ()):
                for u in builder.tris[t2]:
                    if u != v and builder._ekey(v, u) in builder.constrained:
                        nbrs.add(u)
            dirs = []
            for u in sorted(nbrs):
                dx = builder.pts[u][0] - builder.pts[v][0]
                dy = builder.pts[u][1] - builder.pts[v][1]
                L = math.hypot(dx, dy)
                if L > 0:
                    dirs.append((dx / L, dy / L))
            for i in range(len(dirs)):
                for j in range(i + 1, len(dirs)):
                    dot = dirs[i][0] * dirs[j][0] + dirs[i][1] * dirs[j][1]
                    if dot > 0.5:  # angle below 60 degrees
                        return True
        return False

    stalled: set[int] = set()
    while budget > 0:
        budget -= 1
        if seg_queue:
            key = seg_queue.popleft()
            if key not in builder.constrained or key not in builder.edge_tris:
                continue
            if encroached_by_neighbors(key):
                vid = split_segment(key)
                if vid is not None:
                    after_insert(vid)
            continue
        if not tri_heap:
            leftover = [
                tid
                for tid in sorted(builder.tris)
                if tid not in stalled
                and skinny_sin(tid)[0] < sin_bound
                and skinny_sin(tid)[1] > min_len
            ]
            if not leftover:
                break
            for tid in leftover:
                heapq.heappush(tri_heap, (-circumradius2(tid), tid))
        _, tid = heapq.heappop(tri_heap)
        if tid not in builder.tris:
            continue
        s, shortest = skinny_sin(tid)
        if s >= sin_bound or shortest <= min_len:
            continue
        if exempt_small_input_angle(tid):
            stalled.add(tid)
            continue
        a = builder.tris[tid][0]
        try:
            cx, cy = _circumcenter(
                builder.pts[builder.tris[tid][0]],
                builder.pts[builder.tris[tid][1]],
                builder.pts[builder.tris[tid][2]],
            )
        except MeshError:
            stalled.add(tid)
            continue
        enc = []
        for key in sorted(builder.constrained):
            ka, kb = key
            pa, pb = builder.pts[ka], builder.pts[kb]
            mx, my = (pa[0] + pb[0]) * 0.5, (pa[1] + pb[1]) * 0.5
            r2 = ((pa[0] - pb[0]) ** 2 + (pa[1] - pb[1]) ** 2) * 0.25
            if (cx - mx) ** 2 + (cy - my) ** 2 < r2 and seg_len2(key) > min_len * min_len:
                enc.append(key)
        blk = builder.blocking_constraint(tid, cx, cy)
        if blk is not None:
            enc.append(blk)
        if enc:
            progress = False
            for key in enc:
                vid = split_segment(key)
                if vid is not None:
                    after_insert(vid)
                    progress = True
            if progress:
                push_tri(tid) if tid in builder.tris else None
            else:
                stalled.add(tid)
            continue
        vid = None
        if occupy(cx, cy):
            try:
                vid = builder.insert_point(cx, cy, a, clearance=min_len * 0.25)
            except MeshError:
                vid = None
        if vid is None:
            # Center unusable (outside hull, or on existing geometry):
            # retreat from the shortest edge's midpoint toward the center.
            t = builder.tris[tid]
            u, v = min(
                ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])),
                key=lambda e: (builder.pts[e[0]][0] - builder.pts[e[1]][0]) ** 2
                + (builder.pts[e[0]][1] - builder.pts[e[1]][1]) ** 2,
            )
            mx = (builder.pts[u][0] + builder.pts[v][0]) * 0.5
            my = (builder.pts[u][1] + builder.pts[v][1]) * 0.5
            for t_back in (0.5, 0.25, 0.125):
                px = mx + (cx - mx) * t_back
                py = my + (cy - my) * t_back
                if not occupy(px, py):
                    continue
                try:
                    vid = builder.insert_point(px, py, a, clearance=min_len * 0.25)
                    break
                except MeshError:
                    vid = None
            if vid is None:
                stalled.add(tid)
                continue
        builder._lawson(vid)
        after_insert(vid)

    for tid in sorted(builder.tris):
        s, shortest = skinny_sin(tid)
        if s < sin_bound and shortest > min_len and not exempt_small_input_angle(tid):
            raise MeshError(
                "refinement budget exhausted before reaching the angle bound"
            )


def _circumcenter(pa, pb, pc) -> tuple[float, float]:
    ax, ay = pa
    bx, by = pb
    cx, cy = pc
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    if d == 0.0:
        raise MeshError("degenerate triangle has no circumcenter")
    ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / d
    uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / d
    return ux, uy


def _finalize(
    builder: _Builder,
    segments: list[InputSegment],
    boundaries: list[NodeBoundary],
    vert_index: dict[tuple[float, float], int],
    snap_eps: float,
) -> Mesh:
    verts = np.array(builder.pts, dtype=np.float64)
    keys = sorted(builder.edge_tris.keys())
    edge_verts = np.array(keys, dtype=np.int64).reshape(-1, 2)
    ne = len(keys)
    edge_len = np.hypot(
        verts[edge_verts[:, 0], 0] - verts[edge_verts[:, 1], 0],
        verts[edge_verts[:, 0], 1] - verts[edge_verts[:, 1], 1],
    )
    constrained = np.array([k in builder.constrained for k in keys], dtype=bool)
    eidx = {k: i for i, k in enumerate(keys)}

    edge_cover: dict[int, tuple[int, ...]] = {}
    segment_children: dict[int, list[int]] = {s.cid: [] for s in segments}
    for key, cids in builder.cover.items():
        if key not in eidx:
            continue
        e = eidx[key]
        edge_cover[e] = tuple(cids)
        for cid in cids:
            segment_children[cid].append(e)

    interior = _interior_edges(builder, boundaries, vert_index, eidx)
    routable = np.ones(ne, dtype=bool)
    for e in interior:
        routable[e] = False

    tris = np.array(sorted(builder.tris.values()), dtype=np.int64) if builder.tris else np.empty((0, 3), np.int64)

    corners = []
    for nb in boundaries:
        ids = [vert_index[(float(x), float(y))] for x, y in nb.polygon]
        corners.append(np.array(sorted(set(ids)), dtype=np.int64))

    return Mesh(
        verts=verts,
        edge_verts=edge_verts,
        edge_len=edge_len,
        edge_constrained=constrained,
        edge_routable=routable,
        triangles=tris,
        segments=segments,
        edge_cover=edge_cover,
        segment_children={cid: tuple(sorted(es)) for cid, es in segment_children.items()},
        boundary_corners=corners,
        vert_index=vert_index,
        snap_eps=snap_eps,
    )


def _interior_edges(
    builder: _Builder,
    boundaries: list[NodeBoundary],
    vert_index: dict[tuple[float, float], int],
    eidx: dict[tuple[int, int], int],
) -> set[int]:
    """Edges strictly inside a boundary polygon: not legal for routing."""
    interior: set[int] = set()
    for nb in boundaries:
        corner_ids = [vert_index[(float(x), float(y))] for x, y in nb.polygon]
        seed = None
        for vid in corner_ids:
            for tid in sorted(builder.vert_tris.get(vid, ())):
                a, b, c = builder.tris[tid]
                cx = (builder.pts[a][0] + builder.pts[b][0] + builder.pts[c][0]) / 3.0
                cy = (builder.pts[a][1] + builder.pts[b][1] + builder.pts[c][1]) / 3.0
                if nb.contains(cx, cy):
                    seed = tid
                    break
            if seed is not None:
                break
        if seed is None:
            continue
        region = {seed}
        stack = [seed]
        while stack:
            tid = stack.pop()
            a, b, c = builder.tris[tid]
            for u, v in ((a, b), (b, c), (c, a)):
                key = builder._ekey(u, v)
                if key in builder.constrained:
                    continue
                for nxt in builder.edge_tris[key] - {tid}:
                    if nxt not in region:
                        region.add(nxt)
                        stack.append(nxt)
        for tid in region:
            a, b, c = builder.tris[tid]
            for u, v in ((a, b), (b, c), (c, a)):
                key = builder._ekey(u, v)
                if key in builder.constrained:
                    continue
                if builder.edge_tris[key] <= region:
                    if key in eidx:
                        interior.add(eidx[key])
    return interior
