"""Planar primitives shared by the meshing, layering and verification code.

Coordinates are float64 in graph units.  All code that feeds the
triangulation snaps coordinates to a grid of ``SNAP_REL * diag(bbox)`` so
that points produced by independent arithmetic paths compare equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Relative snap grid; one global constant so re-snapping is idempotent.
SNAP_REL = 1e-9


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle, origin at the bottom-left corner."""

    x: float
    y: float
    w: float
    h: float

    @property
    def x1(self) -> float:
        return self.x + self.w

    @property
    def y1(self) -> float:
        return self.y + self.h

    @property
    def diag(self) -> float:
        return math.hypot(self.w, self.h)

    def contains(self, px: float, py: float) -> bool:
        return self.x <= px <= self.x1 and self.y <= py <= self.y1

    def intersects(self, other: "Rect") -> bool:
        return not (
            other.x > self.x1
            or other.x1 < self.x
            or other.y > self.y1
            or other.y1 < self.y
        )

    @staticmethod
    def bounding(points: np.ndarray) -> "Rect":
        xs, ys = points[:, 0], points[:, 1]
        x0, y0 = float(xs.min()), float(ys.min())
        return Rect(x0, y0, float(xs.max()) - x0, float(ys.max()) - y0)

    def inflated(self, margin: float) -> "Rect":
        return Rect(self.x - margin, self.y - margin, self.w + 2 * margin, self.h + 2 * margin)


@dataclass(frozen=True)
class NodeBoundary:
    """Regular polygon approximating a node disk of the current layer size."""

    center: tuple[float, float]
    radius: float
    polygon: np.ndarray  # (k, 2) corner coordinates, CCW starting at angle 0

    @staticmethod
    def octagon(cx: float, cy: float, radius: float, snap_eps: float = 0.0) -> "NodeBoundary":
        ang = np.arange(8) * (math.pi / 4.0)
        poly = np.stack([cx + radius * np.cos(ang), cy + radius * np.sin(ang)], axis=1)
        if snap_eps > 0.0:
            poly = snap(poly, snap_eps)
        return NodeBoundary((cx, cy), radius, poly)

    def contains(self, px: float, py: float) -> bool:
        """Point-in-convex-polygon, boundary inclusive."""
        poly = self.polygon
        n = len(poly)
        for i in range(n):
            ax, ay = poly[i]
            bx, by = poly[(i + 1) % n]
            if (bx - ax) * (py - ay) - (by - ay) * (px - ax) < 0.0:
                return False
        return True


def snap(points: np.ndarray, eps: float) -> np.ndarray:
    """Round coordinates onto the eps grid (idempotent for a fixed eps)."""
    return np.round(np.asarray(points, dtype=np.float64) / eps) * eps


def snap_eps_for(bbox: Rect) -> float:
    return SNAP_REL * bbox.diag


def orient(ax: float, ay: float, bx: float, by: float, cx: float, cy: float) -> float:
    """Signed double area of triangle abc (>0 for counter-clockwise)."""
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def seg_seg_properly_cross(p1, p2, q1, q2) -> bool:
    """True when the open segments share exactly one interior point."""
    d1 = orient(q1[0], q1[1], q2[0], q2[1], p1[0], p1[1])
    d2 = orient(q1[0], q1[1], q2[0], q2[1], p2[0], p2[1])
    d3 = orient(p1[0], p1[1], p2[0], p2[1], q1[0], q1[1])
    d4 = orient(p1[0], p1[1], p2[0], p2[1], q2[0], q2[1])
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0 and d3 != 0 and d4 != 0


def point_seg_dist(px: float, py: float, ax: float, ay: float, bx: float, by: float) -> float:
    vx, vy = bx - ax, by - ay
    L2 = vx * vx + vy * vy
    if L2 == 0.0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * vx + (py - ay) * vy) / L2
    t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
    return math.hypot(px - (ax + t * vx), py - (ay + t * vy))


def point_on_segment(px: float, py: float, ax: float, ay: float, bx: float, by: float, tol: float) -> bool:
    """Point lies on the closed segment within tol (endpoints included)."""
    return point_seg_dist(px, py, ax, ay, bx, by) <= tol


def seg_rect_intersect(x1: float, y1: float, x2: float, y2: float, rect: Rect) -> bool:
    """Closed-set intersection: touching the rectangle boundary counts."""
    if max(x1, x2) < rect.x or min(x1, x2) > rect.x1:
        return False
    if max(y1, y2) < rect.y or min(y1, y2) > rect.y1:
        return False
    if rect.contains(x1, y1) or rect.contains(x2, y2):
        return True
    corners = (
        (rect.x, rect.y),
        (rect.x1, rect.y),
        (rect.x1, rect.y1),
        (rect.x, rect.y1),
    )
    # Segment vs each rectangle side, closed semantics via on-segment tests.
    for i in range(4):
        q1, q2 = corners[i], corners[(i + 1) % 4]
        if seg_seg_properly_cross((x1, y1), (x2, y2), q1, q2):
            return True
        if point_on_segment(q1[0], q1[1], x1, y1, x2, y2, 0.0):
            return True
        if point_on_segment(x1, y1, q1[0], q1[1], q2[0], q2[1], 0.0):
            return True
        if point_on_segment(x2, y2, q1[0], q1[1], q2[0], q2[1], 0.0):
            return True
    return False


def disk_rect_intersect(cx: float, cy: float, r: float, rect: Rect) -> bool:
    """Closed disk vs closed rectangle; boundary touch counts."""
    dx = max(rect.x - cx, 0.0, cx - rect.x1)
    dy = max(rect.y - cy, 0.0, cy - rect.y1)
    return dx * dx + dy * dy <= r * r


def seg_len(ax: float, ay: float, bx: float, by: float) -> float:
    return math.hypot(bx - ax, by - ay)


def collinear_within(px, py, qx, qy, ax, ay, bx, by, tol: float) -> bool:
    """Segment pq lies inside segment ab, both endpoints within tol of ab."""
    return point_seg_dist(px, py, ax, ay, bx, by) <= tol and point_seg_dist(qx, qy, ax, ay, bx, by) <= tol
