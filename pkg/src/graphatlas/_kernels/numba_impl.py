"""Numba-compiled kernels; semantics identical to ``numpy_impl``.

No fastmath: results must match the fallback bit-for-bit so datasets are
byte-identical regardless of backend.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _heap_push(keys, vals, size, key, val):
    i = size
    keys[i] = key
    vals[i] = val
    while i > 0:
        p = (i - 1) >> 1
        if keys[p] > keys[i] or (keys[p] == keys[i] and vals[p] > vals[i]):
            keys[p], keys[i] = keys[i], keys[p]
            vals[p], vals[i] = vals[i], vals[p]
            i = p
        else:
            break
    return size + 1


@njit(cache=True)
def _heap_pop(keys, vals, size):
    key, val = keys[0], vals[0]
    size -= 1
    keys[0] = keys[size]
    vals[0] = vals[size]
    i = 0
    while True:
        l = 2 * i + 1
        r = l + 1
        m = i
        if l < size and (keys[l] < keys[m] or (keys[l] == keys[m] and vals[l] < vals[m])):
            m = l
        if r < size and (keys[r] < keys[m] or (keys[r] == keys[m] and vals[r] < vals[m])):
            m = r
        if m == i:
            break
        keys[m], keys[i] = keys[i], keys[m]
        vals[m], vals[i] = vals[i], vals[m]
        i = m
    return key, val, size


@njit(cache=True)
def settle_shortest_paths(
    indptr,
    adj_vert,
    adj_edge,
    edge_len,
    edge_rail,
    discount,
    start_ids,
    goal_mask,
    goal_pts,
    verts,
):
    nv = len(indptr) - 1
    dist = np.full(nv, np.inf)
    settled = np.zeros(nv, dtype=np.uint8)
    hcache = np.full(nv, -1.0)

    cap = 4 * (len(adj_vert) + len(start_ids)) + 16
    keys = np.empty(cap, dtype=np.float64)
    vals = np.empty(cap, dtype=np.int64)
    size = 0

    for idx in range(len(start_ids)):
        s = start_ids[idx]
        dist[s] = 0.0
        best = np.inf
        for k in range(len(goal_pts)):
            d = np.hypot(goal_pts[k, 0] - verts[s, 0], goal_pts[k, 1] - verts[s, 1])
            if d < best:
                best = d
        hcache[s] = discount * best
        size = _heap_push(keys, vals, size, hcache[s], s)

    best_cost = np.inf
    while size > 0:
        f, v, size = _heap_pop(keys, vals, size)
        if settled[v]:
            continue
        if f > best_cost:
            break
        settled[v] = 1
        if goal_mask[v] and dist[v] < best_cost:
            best_cost = dist[v]
        g = dist[v]
        for k in range(indptr[v], indptr[v + 1]):
            u = adj_vert[k]
            if settled[u]:
                continue
            e = adj_edge[k]
            if edge_rail[e]:
                w = edge_len[e] * discount
            else:
                w = edge_len[e] * 1.0
            nd = g + w
            if nd < dist[u]:
                dist[u] = nd
                h = hcache[u]
                if h < 0.0:
                    hb = np.inf
                    for t in range(len(goal_pts)):
                        d = np.hypot(goal_pts[t, 0] - verts[u, 0], goal_pts[t, 1] - verts[u, 1])
                        if d < hb:
                            hb = d
                    h = discount * hb
                    hcache[u] = h
                size = _heap_push(keys, vals, size, nd + h, u)

    return dist, settled, best_cost


@njit(cache=True)
def stamp_disk(img, cx, cy, r):
    h, w = img.shape
    j0 = max(int(np.floor(cx - r - 0.5)), 0)
    j1 = min(int(np.ceil(cx + r - 0.5)), w - 1)
    i0 = max(int(np.floor(cy - r - 0.5)), 0)
    i1 = min(int(np.ceil(cy + r - 0.5)), h - 1)
    r2 = r * r
    for i in range(i0, i1 + 1):
        dy = (i + 0.5) - cy
        dy2 = dy * dy
        for j in range(j0, j1 + 1):
            dx = (j + 0.5) - cx
            if dy2 + dx * dx <= r2:
                img[i, j] = 1


@njit(cache=True)
def stamp_capsule(img, ax, ay, bx, by, halfw):
    h, w = img.shape
    j0 = max(int(np.floor(min(ax, bx) - halfw - 0.5)), 0)
    j1 = min(int(np.ceil(max(ax, bx) + halfw - 0.5)), w - 1)
    i0 = max(int(np.floor(min(ay, by) - halfw - 0.5)), 0)
    i1 = min(int(np.ceil(max(ay, by) + halfw - 0.5)), h - 1)
    vx, vy = bx - ax, by - ay
    L2 = vx * vx + vy * vy
    if L2 == 0.0:
        stamp_disk(img, ax, ay, halfw)
        return
    hw2 = halfw * halfw
    for i in range(i0, i1 + 1):
        py = i + 0.5
        for j in range(j0, j1 + 1):
            px = j + 0.5
            t = ((px - ax) * vx + (py - ay) * vy) / L2
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
            dx = px - (ax + t * vx)
            dy = py - (ay + t * vy)
            if dx * dx + dy * dy <= hw2:
                img[i, j] = 1


@njit(cache=True)
def find_free_pixel(img, pj, pi):
    h, w = img.shape
    if pi < 0:
        pi = 0
    elif pi >= h:
        pi = h - 1
    if pj < 0:
        pj = 0
    elif pj >= w:
        pj = w - 1
    max_rho = max(h, w)
    for rho in range(max_rho + 1):
        for di in range(-rho, rho + 1):
            i = pi + di
            if i < 0 or i >= h:
                continue
            if di == -rho or di == rho:
                for dj in range(-rho, rho + 1):
                    j = pj + dj
                    if 0 <= j < w and img[i, j] == 0:
                        return i, j
            else:
                j = pj - rho
                if 0 <= j < w and img[i, j] == 0:
                    return i, j
                j = pj + rho
                if 0 <= j < w and img[i, j] == 0:
                    return i, j
    return -1, -1


@njit(cache=True)
def _pt_on_seg(px, py, ax, ay, bx, by):
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


@njit(cache=True)
def _seg_rect(x1, y1, x2, y2, rx0, ry0, rx1, ry1):
    if max(x1, x2) < rx0 or min(x1, x2) > rx1:
        return False
    if max(y1, y2) < ry0 or min(y1, y2) > ry1:
        return False
    if rx0 <= x1 <= rx1 and ry0 <= y1 <= ry1:
        return True
    if rx0 <= x2 <= rx1 and ry0 <= y2 <= ry1:
        return True
    cxs = (rx0, rx1, rx1, rx0)
    cys = (ry0, ry0, ry1, ry1)
    for i in range(4):
        qx1 = cxs[i]
        qy1 = cys[i]
        qx2 = cxs[(i + 1) % 4]
        qy2 = cys[(i + 1) % 4]
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


@njit(cache=True)
def count_seg_tiles(segs, x0, y0, tw, th, out):
    ni, nj = out.shape
    for s in range(len(segs)):
        x1, y1, x2, y2 = segs[s, 0], segs[s, 1], segs[s, 2], segs[s, 3]
        ja = max(int(np.floor((min(x1, x2) - x0) / tw)), 0)
        jb = min(int(np.floor((max(x1, x2) - x0) / tw)), nj - 1)
        ia = max(int(np.floor((min(y1, y2) - y0) / th)), 0)
        ib = min(int(np.floor((max(y1, y2) - y0) / th)), ni - 1)
        for i in range(ia, ib + 1):
            for j in range(ja, jb + 1):
                if _seg_rect(x1, y1, x2, y2, x0 + j * tw, y0 + i * th, x0 + (j + 1) * tw, y0 + (i + 1) * th):
                    out[i, j] += 1


@njit(cache=True)
def count_disk_tiles(centers, r, x0, y0, tw, th, out):
    ni, nj = out.shape
    r2 = r * r
    for s in range(len(centers)):
        cx, cy = centers[s, 0], centers[s, 1]
        ja = max(int(np.floor((cx - r - x0) / tw)), 0)
        jb = min(int(np.floor((cx + r - x0) / tw)), nj - 1)
        ia = max(int(np.floor((cy - r - y0) / th)), 0)
        ib = min(int(np.floor((cy + r - y0) / th)), ni - 1)
        for i in range(ia, ib + 1):
            for j in range(ja, jb + 1):
                rx0, ry0 = x0 + j * tw, y0 + i * th
                dx = max(max(rx0 - cx, 0.0), cx - (rx0 + tw))
                dy = max(max(ry0 - cy, 0.0), cy - (ry0 + th))
                if dx * dx + dy * dy <= r2:
                    out[i, j] += 1
