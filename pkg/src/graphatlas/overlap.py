"""Bitmap-based overlap removal for candidate nodes.

Fixed entities (already-placed node disks and rail segments) are stamped
onto a monochromatic bitmap dilated by the node diameter of the current
layer.  Candidates are then placed one at a time: a candidate keeps its
position when the covering pixel is free, otherwise it moves to the
nearest free pixel center (outward ring scan, deterministic order), and
is stamped itself so later candidates avoid it.
"""

from __future__ import annotations

import math

import numpy as np

from . import _kernels
from .geometry import Rect


class OverlapError(Exception):
    """Bitmap saturated: no free pixel for a candidate."""


class OverlapField:
    """Incremental placement state for one layer's node size."""

    def __init__(self, bbox: Rect, node_radius: float, bitmap_max_px: int = 4096):
        self.bbox = bbox
        self.r = node_radius
        self.d = 2.0 * node_radius
        # Square pixels; aim for diameter/4, clamped by the bitmap budget.
        self.p = max(self.d / 4.0, bbox.w / bitmap_max_px, bbox.h / bitmap_max_px)
        self.px_w = max(int(math.ceil(bbox.w / self.p)), 1)
        self.px_h = max(int(math.ceil(bbox.h / self.p)), 1)
        self.img = np.zeros((self.px_h, self.px_w), dtype=np.uint8)
        # Keep-in-place only when the raster is fine enough that pixel
        # quantization cannot eat the whole dilation margin.
        self.keep_ok = self.p <= self.d / 2.0

    def _to_px(self, x: float, y: float) -> tuple[float, float]:
        return (x - self.bbox.x) / self.p, (y - self.bbox.y) / self.p

    def stamp_fixed_disk(self, cx: float, cy: float, radius: float) -> None:
        jx, iy = self._to_px(cx, cy)
        _kernels.stamp_disk(self.img, jx, iy, (radius + self.d) / self.p)

    def stamp_fixed_segment(self, x1: float, y1: float, x2: float, y2: float) -> None:
        (ja, ia), (jb, ib) = self._to_px(x1, y1), self._to_px(x2, y2)
        _kernels.stamp_capsule(self.img, ja, ia, jb, ib, self.d / self.p)

    def place(self, x: float, y: float) -> tuple[float, float] | None:
        """Free position closest to (x, y), or None when saturated.

        Does not stamp; call stamp_candidate with the returned position.
        """
        jx, iy = self._to_px(x, y)
        j0 = min(max(int(jx), 0), self.px_w - 1)
        i0 = min(max(int(iy), 0), self.px_h - 1)
        if self.keep_ok and self.img[i0, j0] == 0:
            return x, y
        i, j = _kernels.find_free_pixel(self.img, j0, i0)
        if i < 0:
            return None
        return self.bbox.x + (j + 0.5) * self.p, self.bbox.y + (i + 0.5) * self.p

    def stamp_candidate(self, x: float, y: float) -> None:
        jx, iy = self._to_px(x, y)
        _kernels.stamp_disk(self.img, jx, iy, (self.r + self.d) / self.p)


def remove_overlaps(
    bbox: Rect,
    fixed_disks: np.ndarray,  # (m, 3): cx, cy, radius
    fixed_segments: np.ndarray,  # (k, 4): x1, y1, x2, y2
    candidates: np.ndarray,  # (c, 2) input positions, processed in order
    node_radius: float,
    bitmap_max_px: int = 4096,
) -> np.ndarray:
    """Adjusted candidate positions (input order); fixed entities never move.

    Raises OverlapError when the bitmap has no free pixel left.
    """
    field = OverlapField(bbox, node_radius, bitmap_max_px)
    for cx, cy, r in fixed_disks:
        field.stamp_fixed_disk(float(cx), float(cy), float(r))
    for x1, y1, x2, y2 in fixed_segments:
        field.stamp_fixed_segment(float(x1), float(y1), float(x2), float(y2))
    out = np.empty((len(candidates), 2), dtype=np.float64)
    for idx, (x, y) in enumerate(candidates):
        placed = field.place(float(x), float(y))
        if placed is None:
            raise OverlapError(
                "overlap-removal bitmap saturated; increase the bitmap "
                "budget or reduce node size / quotas"
            )
        out[idx] = placed
        field.stamp_candidate(*placed)
    return out
