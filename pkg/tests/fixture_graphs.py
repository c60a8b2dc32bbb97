"""Deterministic graph generators used across the test suite.

All generators emit DOT text with explicit positions, so builds are fully
reproducible.  Node names equal importance ranks where noted.
"""

from __future__ import annotations

import numpy as np

from graphatlas.ingest import RankedGraph, parse_dot, rank_nodes


def _emit_dot(pts: np.ndarray, edges: set[tuple[int, int]], names: list[str] | None = None) -> str:
    n = len(pts)
    names = names or [str(i) for i in range(n)]
    lines = ["graph {"]
    for i in range(n):
        lines.append(f'  "{names[i]}" [pos="{pts[i, 0]:.6f},{pts[i, 1]:.6f}"];')
    for u, v in sorted(edges):
        lines.append(f'  "{names[u]}" -- "{names[v]}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def preferential_graph(n: int, m_edges: int, seed: int, clusters: int = 1, spread: float = 100.0) -> str:
    """Hub-heavy random graph with clustered positions."""
    rng = np.random.default_rng(seed)
    if clusters > 1:
        centers = rng.uniform(0.15 * spread, 0.85 * spread, (clusters, 2))
        which = rng.integers(0, clusters, n)
        pts = centers[which] + rng.normal(0, spread / 10.0, (n, 2))
    else:
        pts = rng.uniform(0, spread, (n, 2))
    edges: set[tuple[int, int]] = set()
    deg = np.ones(n)
    # Spanning connectivity first, then preferential extras.
    for v in range(1, n):
        u = int(rng.choice(v, p=deg[:v] / deg[:v].sum()))
        edges.add((min(u, v), max(u, v)))
        deg[u] += 1
        deg[v] += 1
    guard = 0
    while len(edges) < m_edges and guard < m_edges * 50:
        guard += 1
        u = int(rng.choice(n, p=deg / deg.sum()))
        v = int(rng.integers(0, n))
        if u != v:
            e = (min(u, v), max(u, v))
            if e not in edges:
                edges.add(e)
                deg[u] += 1
                deg[v] += 1
    return _emit_dot(pts, edges)


def rank_named(dot_text: str, method: str = "pagerank") -> str:
    """Re-emit with nodes renamed by importance rank (name == rank index)."""
    g = parse_dot(dot_text)
    order = rank_nodes(g, method)
    rank_of = np.empty(g.n, dtype=np.int64)
    rank_of[order] = np.arange(g.n)
    names = [str(int(rank_of[i])) for i in range(g.n)]
    pts = g.positions
    edges = {(min(u, v), max(u, v)) for u, v in g.edges}
    return _emit_dot(pts, edges, names)


def abstract_like() -> str:
    """47-node fixture shaped to split into exactly three layers at the
    default quotas (Q_N=80, Q_R=180) and default node size."""
    return rank_named(preferential_graph(47, 50, seed=33, clusters=1, spread=160.0))


def b100_like(seed: int = 5) -> str:
    """1436 nodes / 5806 edges, the scale of the reference browsing graph."""
    return preferential_graph(1436, 5806, seed=seed, clusters=9, spread=1000.0)


def star_graph(leaves: int, radius: float = 50.0) -> str:
    """Hub with leaves on a circle; positions far apart relative to node size."""
    n = leaves + 1
    pts = np.zeros((n, 2))
    ang = np.linspace(0, 2 * np.pi, leaves, endpoint=False)
    pts[1:, 0] = radius * np.cos(ang)
    pts[1:, 1] = radius * np.sin(ang)
    edges = {(0, i) for i in range(1, n)}
    return _emit_dot(pts, edges)


def random_graph(seed: int) -> tuple[str, int, int]:
    """One of the seeded acceptance graphs: (dot, qn, qr)."""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(50, 180))
    m = int(n * rng.uniform(1.5, 3.5))
    clusters = int(rng.integers(1, 5))
    dot = preferential_graph(n, m, seed=seed + 1000, clusters=clusters)
    qn, qr = (80, 180) if seed % 2 == 0 else (40, 96)
    return dot, qn, qr
