"""Independent oracles the tests check the implementation against.

Everything here is deliberately written from scratch against the
contracts (plain heapq Dijkstra, full-scan pixel search, all-pairs
overlap checks), not by calling the code under test.
"""

from __future__ import annotations

import heapq
import math

import numpy as np


def dijkstra_cost(mesh, src_ids, tgt_ids, discount: float, onrail) -> float:
    """Cheapest corner-to-corner cost over the routable mesh graph."""
    indptr, adj_vert, adj_edge = mesh.csr(routable_only=True)
    targets = set(int(t) for t in tgt_ids)
    dist: dict[int, float] = {}
    heap = []
    for s in src_ids:
        dist[int(s)] = 0.0
        heapq.heappush(heap, (0.0, int(s)))
    done: set[int] = set()
    while heap:
        d, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        if v in targets:
            return d
        for k in range(indptr[v], indptr[v + 1]):
            u = int(adj_vert[k])
            e = adj_edge[k]
            w = mesh.edge_len[e] * (discount if onrail[e] else 1.0)
            nd = d + w
            if nd < dist.get(u, math.inf):
                dist[u] = nd
                heapq.heappush(heap, (nd, u))
    return math.inf


def path_cost(mesh, path: list[int], discount: float, onrail) -> float:
    total = 0.0
    for a, b in zip(path, path[1:]):
        e = mesh.edge_id(a, b)
        total += mesh.edge_len[e] * (discount if onrail[e] else 1.0)
    return total


def free_pixels(img: np.ndarray) -> set[tuple[int, int]]:
    return {(i, j) for i in range(img.shape[0]) for j in range(img.shape[1]) if img[i, j] == 0}


def min_chebyshev(img: np.ndarray, pi: int, pj: int) -> int | None:
    """Smallest ring distance from (pi, pj) holding a free pixel."""
    best = None
    for i in range(img.shape[0]):
        for j in range(img.shape[1]):
            if img[i, j] == 0:
                rho = max(abs(i - pi), abs(j - pj))
                if best is None or rho < best:
                    best = rho
    return best


def segment_cover_walk(mesh, cid: int, tol: float) -> None:
    """Assert input segment cid equals the union of its child mesh edges."""
    seg = mesh.segments[cid]
    ax, ay, bx, by = seg.ax, seg.ay, seg.bx, seg.by
    length = math.hypot(bx - ax, by - ay)
    children = mesh.segment_children[cid]
    assert children, f"constraint {cid} has no child edges"
    intervals = []
    total = 0.0
    for e in children:
        va, vb = mesh.edge_verts[e]
        for vid in (va, vb):
            px, py = mesh.verts[vid]
            d = _point_seg_dist(px, py, ax, ay, bx, by)
            assert d <= tol, f"child vertex off the segment by {d}"
        ta = _param_along(mesh.verts[va], ax, ay, bx, by, length)
        tb = _param_along(mesh.verts[vb], ax, ay, bx, by, length)
        intervals.append(tuple(sorted((ta, tb))))
        total += mesh.edge_len[e]
    intervals.sort()
    assert abs(intervals[0][0]) <= tol / max(length, tol), "cover does not start at the segment start"
    cur = intervals[0][1]
    for lo, hi in intervals[1:]:
        assert lo <= cur + tol / max(length, tol), "gap in segment cover"
        cur = max(cur, hi)
    assert abs(cur - 1.0) <= tol / max(length, tol), "cover does not reach the segment end"
    assert abs(total - length) <= 1e-9 * max(length, 1.0) + tol, "child lengths do not sum to parent length"


def _param_along(p, ax, ay, bx, by, length) -> float:
    return ((p[0] - ax) * (bx - ax) + (p[1] - ay) * (by - ay)) / (length * length)


def _point_seg_dist(px, py, ax, ay, bx, by) -> float:
    vx, vy = bx - ax, by - ay
    L2 = vx * vx + vy * vy
    if L2 == 0:
        return math.hypot(px - ax, py - ay)
    t = min(max(((px - ax) * vx + (py - ay) * vy) / L2, 0.0), 1.0)
    return math.hypot(px - (ax + t * vx), py - (ay + t * vy))


def label_overlaps_at(layers, plan, zoom: float) -> list[tuple]:
    """All-pairs overlap check of visible labels and node disks at a zoom.

    Returns a list of offending pairs (empty = clean).  Vectorized over
    full pairwise matrices but exhaustive: every visible pair is tested.
    """
    g = layers.graph
    vis = [v for v in range(g.n) if plan.levels[v] <= zoom]
    nodes = [v for v in range(g.n) if 2.0 ** layers.z_exp[v] <= zoom]
    bad: list[tuple] = []
    boxes = np.array([plan.box_at(layers, v, zoom) for v in vis], dtype=np.float64).reshape(-1, 4)
    r = layers.initial_radius / zoom
    m = len(vis)
    if m:
        x0, y0, x1, y1 = boxes[:, 0], boxes[:, 1], boxes[:, 2], boxes[:, 3]
        ov = (
            (x0[:, None] < x1[None, :])
            & (x0[None, :] < x1[:, None])
            & (y0[:, None] < y1[None, :])
            & (y0[None, :] < y1[:, None])
        )
        iu = np.triu_indices(m, k=1)
        hits = np.nonzero(ov[iu])[0]
        for k in hits:
            bad.append(("label-label", vis[int(iu[0][k])], vis[int(iu[1][k])]))
    if nodes and m:
        centers = layers.positions[nodes]
        dx = np.maximum(
            np.maximum(boxes[:, 0][:, None] - centers[:, 0][None, :], 0.0),
            centers[:, 0][None, :] - boxes[:, 2][:, None],
        )
        dy = np.maximum(
            np.maximum(boxes[:, 1][:, None] - centers[:, 1][None, :], 0.0),
            centers[:, 1][None, :] - boxes[:, 3][:, None],
        )
        ov = dx * dx + dy * dy < r * r
        for a, k in zip(*np.nonzero(ov)):
            bad.append(("label-disk", vis[int(a)], nodes[int(k)]))
    return bad


def simulate_node_quota_layers(positions: np.ndarray, order, bbox, r0: float, qn: int) -> list[list[int]]:
    """Tile-counting simulation of the candidate scan with rails ignored.

    Valid comparison when positions are far apart relative to node size
    (overlap removal is then the identity) and the rail quota is huge.
    Returns the cumulative node list per layer.
    """
    z = {}
    layers = []
    n = 0
    while len(z) < len(positions):
        radius = r0 / 2**n
        tw, th = bbox.w / 2**n, bbox.h / 2**n
        counts: dict[tuple[int, int], int] = {}

        def cells(cx, cy):
            out = []
            ja = max(int(math.floor((cx - radius - bbox.x) / tw)), 0)
            jb = int(math.floor((cx + radius - bbox.x) / tw))
            ia = max(int(math.floor((cy - radius - bbox.y) / th)), 0)
            ib = int(math.floor((cy + radius - bbox.y) / th))
            for i in range(ia, ib + 1):
                for j in range(ja, jb + 1):
                    rx, ry = bbox.x + j * tw, bbox.y + i * th
                    dx = max(rx - cx, 0.0, cx - (rx + tw))
                    dy = max(ry - cy, 0.0, cy - (ry + th))
                    if dx * dx + dy * dy <= radius * radius:
                        out.append((i, j))
            return out

        for v in order:
            v = int(v)
            if v in z:
                for c in cells(*positions[v]):
                    counts[c] = counts.get(c, 0) + 1
        for v in order:
            v = int(v)
            if v in z:
                continue
            cs = cells(*positions[v])
            if all(counts.get(c, 0) + 1 <= qn // 4 for c in cs):
                for c in cs:
                    counts[c] = counts.get(c, 0) + 1
                z[v] = n
            else:
                break
        layers.append([int(v) for v in order if v in z])
        n += 1
        if n > 40:
            raise AssertionError("simulation did not converge")
    return layers
