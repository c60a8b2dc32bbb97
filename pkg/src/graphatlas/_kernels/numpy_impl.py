"""Pure numpy/heapq reference implementations of the hot kernels.

This is the fallback backend (``GRAPHATLAS_NUMBA=0`` or numba missing).
The numba backend must produce identical results; the equivalence is
covered by tests and the two are compared in ``benchmarks/``.
"""

from __future__ import annotations

import heapq
import math

import numpy as np


def settle_shortest_paths(
    indptr: np.ndarray,
    adj_vert: np.ndarray,
    adj_edge: np.ndarray,
    edge_len: np.ndarray,
    edge_rail: np.ndarray,
    discount: float,
    start_ids: np.ndarray,
    goal_mask: np.ndarray,
    goal_pts: np.ndarray,
    verts: np.ndarray,
):
    """Multi-source Dijkstra with A* pruning toward the goal vertex set.

    Starts from every vertex in ``start_ids`` at cost 0 and settles every
    vertex whose f = g + h does not exceed the best goal cost, so all
    optimal paths are recoverable from the returned arrays.  The heuristic
    ``h(v) = discount * min_k |v - goal_pts[k]|`` underestimates the true
    remaining cost because every edge weight is at least
    ``discount * length``.

    Returns ``(dist, settled, best_cost)``.
    """
    nv = len(indptr) - 1
    dist = np.full(nv, np.inf)
    settled = np.zeros(nv, dtype=np.uint8)
    hcache = np.full(nv, -1.0)

    def heur(v: int) -> float:
        h = hcache[v]
        if h < 0.0:
            vx, vy = verts[v, 0], verts[v, 1]
            best = math.inf
            for k in range(len(goal_pts)):
                d = math.hypot(goal_pts[k, 0] - vx, goal_pts[k, 1] - vy)
                if d < best:
                    best = d
            h = discount * best
            hcache[v] = h
        return h

    heap: list[tuple[float, int]] = []
    for s in start_ids:
        s = int(s)
        dist[s] = 0.0
        heapq.heappush(heap, (heur(s), s))
    best_cost = math.inf

    while heap:
        f, v = heapq.heappop(heap)
        if settled[v]:
            continue
        if f > best_cost:
            break
        settled[v] = 1
        if goal_mask[v] and dist[v] < best_cost:
            best_cost = dist[v]
        g = dist[v]
        for k in range(indptr[v], indptr[v + 1]):
            u = int(adj_vert[k])
            if settled[u]:
                continue
            e = adj_edge[k]
            w = edge_len[e] * (discount if edge_rail[e] else 1.0)
            nd = g + w
            if nd < dist[u]:
                dist[u] = nd
                heapq.heappush(heap, (nd + heur(u), u))

    return dist, settled, best_cost


def stamp_disk(img: np.ndarray, cx: float, cy: float, r: float) -> None:
    """Mark pixels whose center lies within the disk (pixel units)."""
    h, w = img.shape
    j0 = max(int(math.floor(cx - r - 0.5)), 0)
    j1 = min(int(math.ceil(cx + r - 0.5)), w - 1)
    i0 = max(int(math.floor(cy - r - 0.5)), 0)
    i1 = min(int(math.ceil(cy + r - 0.5)), h - 1)
    if j0 > j1 or i0 > i1:
        return
    jj = np.arange(j0, j1 + 1, dtype=np.float64) + 0.5 - cx
    ii = np.arange(i0, i1 + 1, dtype=np.float64) + 0.5 - cy
    mask = ii[:, None] * ii[:, None] + jj[None, :] * jj[None, :] <= r * r
    img[i0 : i1 + 1, j0 : j1 + 1][mask] = 1


def stamp_capsule(img: np.ndarray, ax: float, ay: float, bx: float, by: float, halfw: float) -> None:
    """Mark pixels whose center is within halfw of segment ab (pixel units)."""
    h, w = img.shape
    j0 = max(int(math.floor(min(ax, bx) - halfw - 0.5)), 0)
    j1 = min(int(math.ceil(max(ax, bx) + halfw - 0.5)), w - 1)
    i0 = max(int(math.floor(min(ay, by) - halfw - 0.5)), 0)
    i1 = min(int(math.ceil(max(ay, by) + halfw - 0.5)), h - 1)
    if j0 > j1 or i0 > i1:
        return
    jj = np.arange(j0, j1 + 1, dtype=np.float64) + 0.5
    ii = np.arange(i0, i1 + 1, dtype=np.float64) + 0.5
    px, py = np.meshgrid(jj, ii)
    vx, vy = bx - ax, by - ay
    L2 = vx * vx + vy * vy
    if L2 == 0.0:
        stamp_disk(img, ax, ay, halfw)
        return
    t = np.clip(((px - ax) * vx + (py - ay) * vy) / L2, 0.0, 1.0)
    dx = px - (ax + t * vx)
    dy = py - (ay + t * vy)
    mask = dx * dx + dy * dy <= halfw * halfw
    img[i0 : i1 + 1, j0 : j1 + 1][mask] = 1


def find_free_pixel(img: np.ndarray, pj: int, pi: int) -> tuple[int, int]:
    """Nearest free pixel by outward Chebyshev ring scan; fixed scan order.

    Returns (i, j) or (-1, -1) when the bitmap is saturated.
    """
    h, w = img.shape
    pi = min(max(pi, 0), h - 1)
    pj = min(max(pj, 0), w - 1)
    max_rho = max(h, w)
    for rho in range(max_rho + 1):
        for di in range(-rho, rho + 1):
            i = pi + di
            if i < 0 or i >= h:
                continue
            if abs(di) == rho:
                for dj in range(-rho, rho + 1):
                    j = pj + dj
                    if 0 <= j < w and img[i, j] == 0:
                        return i, j
            else:
                for dj in (-rho, rho):
                    j = pj + dj
                    if 0 <= j < w and img[i, j] == 0:
                        return i, j
    return -1, -1


def _seg_rect(x1, y1, x2, y2, rx0, ry0, rx1, ry1) -> bool:
    # Closed-set segment/rectangle intersection (mirrors geometry.seg_rect_intersect).
    if max(x1, x2) < rx0 or min(x1, x2) > rx1:
        return False
    if max(y1, y2) < ry0 or min(y1, y2) > ry1:
        return False
    if rx0 <= x1 <= rx1 and ry0 <= y1 <= ry1:
        return True
    if rx0 <= x2 <= rx1 and ry0 <= y2 <= ry1:
        return True
    cs = ((rx0, ry0), (rx1, ry0), (rx1, ry1), (rx0, ry1))
    for i in range(4):
        qx1, qy1 = cs[i]
        qx2, qy2 = cs[(i + 1) % 4]
        d1 = (qx2 - qx1) * (y1 - qy1) - (qy2 - qy1) * (x1 - qx1)
        d2 = (qx2 - qx1) * (y2 - qy1) - (qy2 - qy1) * (x2 - qx1)
        d3 = (x2 - x1) * (qy1 - y1) - (y2 - y1) * (qx1 - x1)
        d4 = (x2 - x1) * (qy2 - y1) - (y2 - y1) * (qx2 - x1)
        if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0:
            return True
        if _pt_on_seg(qx1, qy1, x1, y1, x2, y2):
            return True
        if _pt_on_seg(x1, y1, qx1, qy1, qx2, qy2) or _pt_on_seg(x2, y2, qx1, qy1, qx2, qy2):
            return True
    return False


def _pt_on_seg(px, py, ax, ay, bx, by) -> bool:
    vx, vy = bx - ax, by - ay
    L2 = vx * vx + vy * vy
    if L2 == 0.0:
        return px == ax and py == ay
    t = ((px - ax) * vx + (py - ay) * vy) / L2
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    dx = px - (ax + t * vx)
    dy = py - (ay + t * vy)
    return dx * dx + dy * dy == 0.0


def count_seg_tiles(
    segs: np.ndarray,
    x0: float,
    y0: float,
    tw: float,
    th: float,
    out: np.ndarray,
) -> None:
    """Accumulate, per grid cell, how many segments intersect it (closed)."""
    nj, ni = out.shape[1], out.shape[0]
    for s in range(len(segs)):
        x1, y1, x2, y2 = segs[s]
        ja = max(int(math.floor((min(x1, x2) - x0) / tw)), 0)
        jb = min(int(math.floor((max(x1, x2) - x0) / tw)), nj - 1)
        ia = max(int(math.floor((min(y1, y2) - y0) / th)), 0)
        ib = min(int(math.floor((max(y1, y2) - y0) / th)), ni - 1)
        for i in range(ia, ib + 1):
            for j in range(ja, jb + 1):
                if _seg_rect(x1, y1, x2, y2, x0 + j * tw, y0 + i * th, x0 + (j + 1) * tw, y0 + (i + 1) * th):
                    out[i, j] += 1


def count_disk_tiles(
    centers: np.ndarray,
    r: float,
    x0: float,
    y0: float,
    tw: float,
    th: float,
    out: np.ndarray,
) -> None:
    """Accumulate, per grid cell, how many disks intersect it (closed)."""
    nj, ni = out.shape[1], out.shape[0]
    for s in range(len(centers)):
        cx, cy = centers[s]
        ja = max(int(math.floor((cx - r - x0) / tw)), 0)
        jb = min(int(math.floor((cx + r - x0) / tw)), nj - 1)
        ia = max(int(math.floor((cy - r - y0) / th)), 0)
        ib = min(int(math.floor((cy + r - y0) / th)), ni - 1)
        for i in range(ia, ib + 1):
            for j in range(ja, jb + 1):
                rx0, ry0 = x0 + j * tw, y0 + i * th
                dx = max(rx0 - cx, 0.0, cx - (rx0 + tw))
                dy = max(ry0 - cy, 0.0, cy - (ry0 + th))
                if dx * dx + dy * dy <= r * r:
                    out[i, j] += 1
