"""Both kernel backends must agree exactly; datasets are byte-identical
whichever one is active."""

import numpy as np
import pytest

from graphatlas._kernels import BACKEND, numba_impl, numpy_impl


BACKENDS = (numpy_impl, numba_impl)


def test_active_backend_is_numba_by_default():
    assert BACKEND == "numba"


def random_csr(rng, nv=40, extra=60):
    edges = set()
    for v in range(1, nv):
        u = int(rng.integers(0, v))
        edges.add((u, v))
    while len(edges) < nv - 1 + extra:
        u, v = rng.integers(0, nv, 2)
        if u != v:
            edges.add((min(u, v), max(u, v)))
    edges = sorted(edges)
    verts = rng.uniform(0, 100, (nv, 2))
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
    elen = np.array(
        [np.hypot(*(verts[u] - verts[v])) for u, v in edges], dtype=np.float64
    )
    return indptr, av, ae, elen, verts, len(edges)


@pytest.mark.parametrize("seed", range(4))
def test_settle_backends_agree(seed):
    rng = np.random.default_rng(seed)
    indptr, av, ae, elen, verts, ne = random_csr(rng)
    onrail = (rng.random(ne) < 0.3).astype(np.uint8)
    starts = np.array(sorted(rng.choice(len(verts), 3, replace=False)), dtype=np.int64)
    goals = np.array(sorted(rng.choice(len(verts), 2, replace=False)), dtype=np.int64)
    goal_mask = np.zeros(len(verts), dtype=np.uint8)
    goal_mask[goals] = 1
    goal_pts = verts[goals]
    results = []
    for impl in BACKENDS:
        dist, settled, best = impl.settle_shortest_paths(
            indptr, av, ae, elen, onrail, 0.8, starts, goal_mask, goal_pts, verts
        )
        results.append((dist, settled, best))
    (d1, s1, b1), (d2, s2, b2) = results
    assert b1 == b2
    assert np.array_equal(s1, s2)
    assert np.array_equal(d1[s1 == 1], d2[s2 == 1])


@pytest.mark.parametrize("seed", range(4))
def test_stamp_backends_agree(seed):
    rng = np.random.default_rng(seed + 10)
    imgs = [np.zeros((64, 80), np.uint8) for _ in BACKENDS]
    for _ in range(12):
        cx, cy, r = rng.uniform(0, 80), rng.uniform(0, 64), rng.uniform(0.5, 9)
        for impl, img in zip(BACKENDS, imgs):
            impl.stamp_disk(img, cx, cy, r)
        x1, y1, x2, y2, hw = (
            rng.uniform(0, 80),
            rng.uniform(0, 64),
            rng.uniform(0, 80),
            rng.uniform(0, 64),
            rng.uniform(0.5, 5),
        )
        for impl, img in zip(BACKENDS, imgs):
            impl.stamp_capsule(img, x1, y1, x2, y2, hw)
    assert np.array_equal(imgs[0], imgs[1])


@pytest.mark.parametrize("seed", range(4))
def test_free_pixel_backends_agree(seed):
    rng = np.random.default_rng(seed + 20)
    img = (rng.random((48, 48)) < 0.7).astype(np.uint8)
    for _ in range(25):
        pj, pi = int(rng.integers(0, 48)), int(rng.integers(0, 48))
        assert numpy_impl.find_free_pixel(img, pj, pi) == tuple(
            numba_impl.find_free_pixel(img, pj, pi)
        )
    full = np.ones((8, 8), np.uint8)
    assert numpy_impl.find_free_pixel(full, 3, 3) == (-1, -1)
    assert tuple(numba_impl.find_free_pixel(full, 3, 3)) == (-1, -1)


@pytest.mark.parametrize("seed", range(3))
def test_tile_counting_backends_agree(seed):
    rng = np.random.default_rng(seed + 30)
    segs = rng.uniform(0, 100, (60, 4))
    centers = rng.uniform(0, 100, (40, 2))
    outs = []
    for impl in BACKENDS:
        grid_s = np.zeros((16, 16), np.int32)
        grid_d = np.zeros((16, 16), np.int32)
        impl.count_seg_tiles(segs, 0.0, 0.0, 100 / 16, 100 / 16, grid_s)
        impl.count_disk_tiles(centers, 3.0, 0.0, 0.0, 100 / 16, 100 / 16, grid_d)
        outs.append((grid_s, grid_d))
    assert np.array_equal(outs[0][0], outs[1][0])
    assert np.array_equal(outs[0][1], outs[1][1])


def test_scalar_seg_rect_agrees_with_geometry_predicate():
    from graphatlas.geometry import Rect, seg_rect_intersect

    rng = np.random.default_rng(5)
    rect = Rect(10, 10, 30, 20)
    for _ in range(300):
        x1, y1, x2, y2 = rng.uniform(0, 60, 4)
        a = seg_rect_intersect(x1, y1, x2, y2, rect)
        b = bool(numpy_impl._seg_rect(x1, y1, x2, y2, 10, 10, 40, 30))
        c = bool(numba_impl._seg_rect(x1, y1, x2, y2, 10, 10, 40, 30))
        assert a == b == c


def test_dataset_bytes_identical_across_backends(tmp_path, abstract_dot_path):
    """A build with GRAPHATLAS_NUMBA=0 (numpy fallback) must produce the
    same bytes as the numba build."""
    import os
    import subprocess
    import sys

    outs = {}
    for backend, flag in (("numba", "1"), ("numpy", "0")):
        out = tmp_path / backend
        env = dict(os.environ, GRAPHATLAS_NUMBA=flag)
        proc = subprocess.run(
            [
                sys.executable,
                "-m",
                "graphatlas.cli",
                "build",
                str(abstract_dot_path),
                str(out),
                "--qn",
                "80",
                "--qr",
                "180",
            ],
            env=env,
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert f"kernel backend: {backend}" in proc.stdout
        outs[backend] = out
    a, b = outs["numba"], outs["numpy"]
    rels = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    assert rels == sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
    for rel in rels:
        assert (a / rel).read_bytes() == (b / rel).read_bytes(), rel
