"""Per-layer tile grid bookkeeping for the node and rail quotas.

Level n subdivides the bounding box into 2^n x 2^n tiles (indices grow
toward +x/+y; content never falls below index 0 because all geometry
stays inside the box).  Counters are sparse: only touched tiles exist.
All intersection tests are closed-set, so touching a tile border counts.
"""

from __future__ import annotations

import math

from .geometry import Rect, disk_rect_intersect, seg_rect_intersect


def count_tile_intersections(tile: Rect, entity: tuple) -> bool:
    """Closed intersection of a tile with a node disk or a rail segment.

    ``entity`` is ("node", cx, cy, r) or ("rail", x1, y1, x2, y2).
    """
    kind = entity[0]
    if kind == "node":
        _, cx, cy, r = entity
        return disk_rect_intersect(cx, cy, r, tile)
    if kind == "rail":
        _, x1, y1, x2, y2 = entity
        return seg_rect_intersect(x1, y1, x2, y2, tile)
    raise ValueError(f"unknown entity kind {kind!r}")


class TileMap:
    """Node / maximal-rail counters for one zoom level."""

    def __init__(self, bbox: Rect, level: int):
        self.bbox = bbox
        self.level = level
        self.tw = bbox.w / (2**level)
        self.th = bbox.h / (2**level)
        self.nodes: dict[tuple[int, int], int] = {}
        self.rails: dict[tuple[int, int], int] = {}

    def tile_rect(self, i: int, j: int) -> Rect:
        return Rect(self.bbox.x + j * self.tw, self.bbox.y + i * self.th, self.tw, self.th)

    def disk_cells(self, cx: float, cy: float, r: float) -> list[tuple[int, int]]:
        ja = max(int(math.floor((cx - r - self.bbox.x) / self.tw)), 0)
        jb = int(math.floor((cx + r - self.bbox.x) / self.tw))
        ia = max(int(math.floor((cy - r - self.bbox.y) / self.th)), 0)
        ib = int(math.floor((cy + r - self.bbox.y) / self.th))
        cells = []
        for i in range(ia, ib + 1):
            for j in range(ja, jb + 1):
                if disk_rect_intersect(cx, cy, r, self.tile_rect(i, j)):
                    cells.append((i, j))
        return cells

    def seg_cells(self, x1: float, y1: float, x2: float, y2: float) -> list[tuple[int, int]]:
        ja0 = max(int(math.floor((min(x1, x2) - self.bbox.x) / self.tw)), 0)
        jb0 = int(math.floor((max(x1, x2) - self.bbox.x) / self.tw))
        ia = max(int(math.floor((min(y1, y2) - self.bbox.y) / self.th)), 0)
        ib = int(math.floor((max(y1, y2) - self.bbox.y) / self.th))
        cells = []
        dy = y2 - y1
        for i in range(ia, ib + 1):
            # Clip the segment to this row's y-band (padded one cell) so a
            # long diagonal stays O(length), not O(bounding-box area).
            if dy != 0.0:
                band_lo = self.bbox.y + (i - 1) * self.th
                band_hi = self.bbox.y + (i + 2) * self.th
                t0 = (band_lo - y1) / dy
                t1 = (band_hi - y1) / dy
                t0, t1 = max(min(t0, t1), 0.0), min(max(t0, t1), 1.0)
                if t0 > t1:
                    continue
                xa = x1 + t0 * (x2 - x1)
                xb = x1 + t1 * (x2 - x1)
                ja = max(int(math.floor((min(xa, xb) - self.bbox.x) / self.tw)) - 1, ja0)
                jb = min(int(math.floor((max(xa, xb) - self.bbox.x) / self.tw)) + 1, jb0)
            else:
                ja, jb = ja0, jb0
            for j in range(ja, jb + 1):
                if seg_rect_intersect(x1, y1, x2, y2, self.tile_rect(i, j)):
                    cells.append((i, j))
        return cells

    # -- nodes ---------------------------------------------------------------

    def node_fits(self, cx: float, cy: float, r: float, per_tile_quota: int) -> bool:
        return all(self.nodes.get(c, 0) + 1 <= per_tile_quota for c in self.disk_cells(cx, cy, r))

    def add_node(self, cx: float, cy: float, r: float) -> None:
        for c in self.disk_cells(cx, cy, r):
            self.nodes[c] = self.nodes.get(c, 0) + 1

    # -- rails ---------------------------------------------------------------

    def rails_fit(self, segments: list[tuple[float, float, float, float]], per_tile_quota: int) -> bool:
        """Would adding all segments keep every touched tile within quota?"""
        delta: dict[tuple[int, int], int] = {}
        for x1, y1, x2, y2 in segments:
            for c in self.seg_cells(x1, y1, x2, y2):
                delta[c] = delta.get(c, 0) + 1
        return all(self.rails.get(c, 0) + d <= per_tile_quota for c, d in delta.items())

    def add_rail(self, x1: float, y1: float, x2: float, y2: float) -> None:
        for c in self.seg_cells(x1, y1, x2, y2):
            self.rails[c] = self.rails.get(c, 0) + 1

    def max_counts(self) -> tuple[int, int]:
        return (max(self.nodes.values(), default=0), max(self.rails.values(), default=0))
