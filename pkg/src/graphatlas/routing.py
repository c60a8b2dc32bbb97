"""Shortest-path routing of graph edges over the triangulation.

Paths run from a corner vertex of the source polygon to a corner vertex of
the target polygon and minimize sum(length(e) * w(e)) where w(e) is the
rail discount for edges already carrying a rail and 1 otherwise.  The
search is an A* settle (kernel backend) whose heuristic
``discount * straight_line`` never overestimates, followed by a greedy
walk that picks the lexicographically smallest optimal vertex sequence.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels
from .geometry import NodeBoundary
from .mesh import Mesh, MeshError


class RoutingError(MeshError):
    """No path between two boundaries; indicates a broken mesh."""


class Router:
    """Reusable search state for one mesh; safe for repeated queries."""

    def __init__(self, mesh: Mesh):
        self.mesh = mesh
        self.indptr, self.adj_vert, self.adj_edge = mesh.csr(routable_only=True)
        self.edge_len = mesh.edge_len
        self.verts = mesh.verts

    def route(
        self,
        source_corners: np.ndarray,
        target_corners: np.ndarray,
        discount: float,
        onrail: np.ndarray,
    ) -> tuple[list[int], float]:
        """Optimal corner-to-corner path; returns (vertex ids, cost)."""
        shared = sorted(set(map(int, source_corners)) & set(map(int, target_corners)))
        if shared:
            return [shared[0]], 0.0
        goal_mask = np.zeros(len(self.verts), dtype=np.uint8)
        goal_mask[source_corners] = 1
        goal_pts = self.verts[source_corners]
        dist, settled, best = _kernels.settle_shortest_paths(
            self.indptr,
            self.adj_vert,
            self.adj_edge,
            self.edge_len,
            onrail,
            discount,
            np.asarray(target_corners, dtype=np.int64),
            goal_mask,
            goal_pts,
            self.verts,
        )
        if not math.isfinite(best):
            raise RoutingError("no route between boundaries (mesh is disconnected)")

        start = -1
        for s in sorted(map(int, source_corners)):
            if settled[s] and dist[s] == best:
                start = s
                break
        if start < 0:
            raise RoutingError("optimal source corner was not settled (kernel bug)")

        path = [start]
        cur = start
        while dist[cur] != 0.0:
            nxt = -1
            for k in range(self.indptr[cur], self.indptr[cur + 1]):
                u = int(self.adj_vert[k])
                if not settled[u]:
                    continue
                e = self.adj_edge[k]
                w = self.edge_len[e] * (discount if onrail[e] else 1.0)
                if dist[u] + w == dist[cur] and (nxt < 0 or u < nxt):
                    nxt = u
            if nxt < 0:
                raise RoutingError("path reconstruction stalled (kernel bug)")
            path.append(nxt)
            cur = nxt
        return path, float(best)

    def path_edges(self, path: list[int]) -> list[int]:
        return [self.mesh.edge_id(a, b) for a, b in zip(path, path[1:])]


def route(
    mesh: Mesh,
    source: NodeBoundary,
    target: NodeBoundary,
    rail_discount: float = 0.8,
    existing_rails: set[int] | None = None,
) -> tuple[list[int], list[int], float]:
    """Route between two boundary polygons present in the mesh.

    Returns (vertex ids, mesh edge ids, cost).  ``existing_rails`` is a set
    of mesh edge indices whose weight is multiplied by ``rail_discount``.
    """
    if source is target or (source.center == target.center and source.radius == target.radius):
        raise ValueError("source and target boundaries must differ")
    onrail = np.zeros(len(mesh.edge_verts), dtype=np.uint8)
    if existing_rails:
        for e in existing_rails:
            onrail[e] = 1
    src = _corner_ids(mesh, source)
    tgt = _corner_ids(mesh, target)
    router = Router(mesh)
    path, cost = router.route(src, tgt, rail_discount, onrail)
    return path, router.path_edges(path), cost


def _corner_ids(mesh: Mesh, nb: NodeBoundary) -> np.ndarray:
    from .geometry import snap

    poly = snap(nb.polygon, mesh.snap_eps) if mesh.snap_eps > 0 else nb.polygon
    ids = []
    for x, y in poly:
        key = (float(x), float(y))
        if key not in mesh.vert_index:
            raise ValueError("boundary polygon is not part of this mesh")
        ids.append(mesh.vert_index[key])
    return np.array(sorted(set(ids)), dtype=np.int64)
