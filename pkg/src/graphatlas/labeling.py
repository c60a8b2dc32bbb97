"""Label zoom levels: each node gets a level l(v) >= z(v) and one of four
anchor positions such that everything visible together stays disjoint.

Zoom levels are tested on the ladder Z_i = delta0 * delta^i.  At each Z_i
all nodes with z <= Z_i (disks of world radius r0/Z_i, i.e. constant
screen size) and all labels assigned so far (boxes scaled to Z_i) sit in
a spatial index; still-unlabeled nodes are tried in importance order at
positions left, right, above, below.  Box sizes shrink like 1/Z_i, so
every label fits eventually.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .layers import LayerSet

POSITIONS = ("left", "right", "above", "below")


class LabelingError(Exception):
    pass


@dataclass
class LabelPlan:
    levels: np.ndarray  # (N,) zoom level at which each label appears
    positions: list[str]  # anchor side per node
    font_height: float  # world units at zoom 1
    char_width_ratio: float
    delta0: float
    delta: float
    visited_levels: list[float]  # the ladder values actually processed

    def box_at(self, layers: LayerSet, v: int, zoom: float) -> tuple[float, float, float, float]:
        """World box (x0, y0, x1, y1) of node v's label at the given zoom."""
        return _label_box(
            layers.positions[v, 0],
            layers.positions[v, 1],
            layers.initial_radius / zoom,
            len(layers.graph.labels[v]),
            self.positions[v],
            self.font_height / zoom,
            self.char_width_ratio,
        )


def _label_box(cx, cy, node_r, chars, side, h, ratio) -> tuple[float, float, float, float]:
    w = max(chars, 1) * ratio * h
    r = node_r * (1.0 + 1e-7)  # hair gap so flush placement survives rounding
    if side == "left":
        return (cx - r - w, cy - h / 2.0, cx - r, cy + h / 2.0)
    if side == "right":
        return (cx + r, cy - h / 2.0, cx + r + w, cy + h / 2.0)
    if side == "above":
        return (cx - w / 2.0, cy + r, cx + w / 2.0, cy + r + h)
    if side == "below":
        return (cx - w / 2.0, cy - r - h, cx + w / 2.0, cy - r)
    raise ValueError(side)


def boxes_overlap(a, b) -> bool:
    """Open-interior overlap; boxes merely touching do not conflict."""
    return a[0] < b[2] and b[0] < a[2] and a[1] < b[3] and b[1] < a[3]


def box_disk_overlap(box, cx, cy, r) -> bool:
    dx = max(box[0] - cx, 0.0, cx - box[2])
    dy = max(box[1] - cy, 0.0, cy - box[3])
    return dx * dx + dy * dy < r * r


class _BoxGrid:
    """Uniform-cell spatial index over label boxes and node disks.

    Queries are exact (boxes as boxes, disks as disks), so the result
    matches a brute-force pairwise check; the grid only prunes.
    """

    def __init__(self, cell: float):
        self.cell = cell
        self.cells: dict[tuple[int, int], list[int]] = {}
        self.entries: list[tuple[str, float, float, float, float]] = []

    def _range(self, box):
        return (
            int(math.floor(box[0] / self.cell)),
            int(math.floor(box[2] / self.cell)),
            int(math.floor(box[1] / self.cell)),
            int(math.floor(box[3] / self.cell)),
        )

    def _insert(self, kind: str, box, a, b, c, d) -> None:
        bid = len(self.entries)
        self.entries.append((kind, a, b, c, d))
        ja, jb, ia, ib = self._range(box)
        for i in range(ia, ib + 1):
            for j in range(ja, jb + 1):
                self.cells.setdefault((i, j), []).append(bid)

    def insert_box(self, box) -> None:
        self._insert("box", box, *box)

    def insert_disk(self, cx: float, cy: float, r: float) -> None:
        self._insert("disk", (cx - r, cy - r, cx + r, cy + r), cx, cy, r, 0.0)

    def collides(self, box) -> bool:
        ja, jb, ia, ib = self._range(box)
        seen: set[int] = set()
        for i in range(ia, ib + 1):
            for j in range(ja, jb + 1):
                for bid in self.cells.get((i, j), ()):
                    if bid in seen:
                        continue
                    seen.add(bid)
                    kind, a, b, c, d = self.entries[bid]
                    if kind == "box":
                        if boxes_overlap(box, (a, b, c, d)):
                            return True
                    elif box_disk_overlap(box, a, b, c):
                        return True
        return False


def plan_labels(
    layers: LayerSet,
    delta0: float = 2.0**-4,
    delta: float = 2.0 ** (1.0 / 8.0),
    font_height: float | None = None,
    char_width_ratio: float = 0.6,
) -> LabelPlan:
    """Greedy assignment of label levels and positions; see module docstring."""
    if delta0 <= 0 or delta <= 1:
        raise LabelingError("need delta0 > 0 and delta > 1")
    graph = layers.graph
    n = graph.n
    r0 = layers.initial_radius
    if font_height is None:
        font_height = 1.2 * r0
    levels = np.full(n, np.inf)
    sides = [""] * n
    z_of = 2.0 ** layers.z_exp.astype(np.float64)
    max_z = float(z_of.max())

    # Enough ladder rungs to reach the deepest layer, then generous slack;
    # boxes shrink as 1/Z so placement cannot stall forever.
    i_reach = int(math.ceil(math.log(max_z / delta0, delta))) + 1
    i_cap = max(64, i_reach + 256)

    order = [int(v) for v in graph.order]
    visited: list[float] = []
    unlabeled = set(order)
    i = 0
    while unlabeled:
        if i > i_cap:
            offenders = sorted(unlabeled)
            raise LabelingError(
                f"labels for nodes {offenders[:10]} still unplaced after {i_cap} zoom steps"
            )
        Z = delta0 * delta**i
        i += 1
        eligible = [v for v in order if z_of[v] <= Z]
        if not eligible:
            continue
        visited.append(Z)
        node_r = r0 / Z
        h = font_height / Z
        grid = _BoxGrid(cell=max(h * 16, node_r * 4))
        for v in eligible:
            cx, cy = layers.positions[v]
            grid.insert_disk(cx, cy, node_r)
        for v in eligible:
            if levels[v] < np.inf:
                cx, cy = layers.positions[v]
                grid.insert_box(
                    _label_box(cx, cy, node_r, len(graph.labels[v]), sides[v], h, char_width_ratio)
                )
        for v in eligible:
            if levels[v] < np.inf:
                continue
            cx, cy = layers.positions[v]
            for side in POSITIONS:
                box = _label_box(cx, cy, node_r, len(graph.labels[v]), side, h, char_width_ratio)
                if grid.collides(box):
                    continue
                levels[v] = Z
                sides[v] = side
                grid.insert_box(box)
                unlabeled.discard(v)
                break

    return LabelPlan(
        levels=levels,
        positions=sides,
        font_height=font_height,
        char_width_ratio=char_width_ratio,
        delta0=delta0,
        delta=delta,
        visited_levels=visited,
    )
