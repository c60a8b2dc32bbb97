#!/usr/bin/env python3
"""Compare the numba kernels against the pure numpy fallback.

Runs the three hot paths (shortest-path settle, bitmap stamping, tile
counting) on identical inputs and prints a timing table.  The numba side
includes a warm-up call so compilation is not measured.

    python3 benchmarks/bench_kernels.py [--nodes 4000] [--repeats 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from graphatlas._kernels import numba_impl, numpy_impl


def build_graph(rng, nv: int):
    verts = rng.uniform(0, 1000, (nv, 2))
    edges = set()
    for v in range(1, nv):
        u = int(rng.integers(max(0, v - 8), v))
        edges.add((u, v))
    while len(edges) < nv * 3:
        u, v = rng.integers(0, nv, 2)
        if u != v:
            edges.add((min(u, v), max(u, v)))
    edges = sorted(edges)
    pairs = []
    for e, (u, v) in enumerate(edges):
        pairs.append((u, v, e))
        pairs.append((v, u, e))
    pairs.sort()
    indptr = np.zeros(nv + 1, dtype=np.int64)
    av = np.empty(len(pairs), dtype=np.int64)
    ae = np.empty(len(pairs), dtype=np.int64)
    for k, (a, b, e) in enumerate(pairs):
        indptr[a + 1] += 1
        av[k] = b
        ae[k] = e
    np.cumsum(indptr, out=indptr)
    elen = np.array([np.hypot(*(verts[u] - verts[v])) for u, v in edges])
    return indptr, av, ae, elen, verts, len(edges)


def timeit(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--nodes", type=int, default=4000)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    indptr, av, ae, elen, verts, ne = build_graph(rng, args.nodes)
    onrail = (rng.random(ne) < 0.3).astype(np.uint8)
    starts = np.array([0, 1], dtype=np.int64)
    goals = np.array([args.nodes - 1, args.nodes - 2], dtype=np.int64)
    goal_mask = np.zeros(args.nodes, dtype=np.uint8)
    goal_mask[goals] = 1
    goal_pts = verts[goals]

    segs = rng.uniform(0, 1000, (5000, 4))
    centers = rng.uniform(0, 1000, (5000, 2))

    rows = []

    def bench(name, np_fn, nb_fn):
        nb_fn()  # warm-up / compile
        t_np = timeit(np_fn, args.repeats)
        t_nb = timeit(nb_fn, args.repeats)
        rows.append((name, t_np, t_nb, t_np / t_nb if t_nb > 0 else float("inf")))

    bench(
        f"settle ({args.nodes} vertices)",
        lambda: numpy_impl.settle_shortest_paths(
            indptr, av, ae, elen, onrail, 0.8, starts, goal_mask, goal_pts, verts
        ),
        lambda: numba_impl.settle_shortest_paths(
            indptr, av, ae, elen, onrail, 0.8, starts, goal_mask, goal_pts, verts
        ),
    )

    def np_stamp():
        img = np.zeros((2048, 2048), np.uint8)
        for i in range(200):
            numpy_impl.stamp_capsule(img, *segs[i, :4] * 2.048, 8.0)
            numpy_impl.stamp_disk(img, centers[i, 0] * 2.048, centers[i, 1] * 2.048, 12.0)

    def nb_stamp():
        img = np.zeros((2048, 2048), np.uint8)
        for i in range(200):
            numba_impl.stamp_capsule(img, *segs[i, :4] * 2.048, 8.0)
            numba_impl.stamp_disk(img, centers[i, 0] * 2.048, centers[i, 1] * 2.048, 12.0)

    bench("bitmap stamping (200 capsules + disks, 2048^2)", np_stamp, nb_stamp)

    def np_tiles():
        grid = np.zeros((64, 64), np.int32)
        numpy_impl.count_seg_tiles(segs, 0.0, 0.0, 1000 / 64, 1000 / 64, grid)
        numpy_impl.count_disk_tiles(centers, 5.0, 0.0, 0.0, 1000 / 64, 1000 / 64, grid)

    def nb_tiles():
        grid = np.zeros((64, 64), np.int32)
        numba_impl.count_seg_tiles(segs, 0.0, 0.0, 1000 / 64, 1000 / 64, grid)
        numba_impl.count_disk_tiles(centers, 5.0, 0.0, 0.0, 1000 / 64, 1000 / 64, grid)

    bench("tile counting (5000 segs + 5000 disks, 64^2)", np_tiles, nb_tiles)

    width = max(len(r[0]) for r in rows) + 2
    print(f"{'kernel':<{width}} {'numpy':>10} {'numba':>10} {'speedup':>9}")
    for name, t_np, t_nb, speed in rows:
        print(f"{name:<{width}} {t_np * 1e3:>8.1f}ms {t_nb * 1e3:>8.1f}ms {speed:>8.1f}x")


if __name__ == "__main__":
    main()
