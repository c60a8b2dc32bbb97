"""Layer construction: assigns every node and rail a power-of-two zoom level.

Round n (n = 0, 1, ...) works on tiles of size bbox/2^n and node disks of
radius r0/2^n:

1. move still-unassigned nodes off already-fixed geometry (overlap removal);
2. select candidates in importance order while every tile stays within the
   per-tile node quota Q_N/4 (stop at the first violator);
3. triangulate current node boundaries plus the previous layer's rails;
4. carry the previous layer's rails forward, subdivided by the new mesh;
5. insert candidates one by one: route their edges to already-inserted
   nodes, and stop the whole round at the first candidate whose new
   maximal rails would push any tile beyond the rail quota Q_R/4.

Nodes committed in round n get z(v) = 2^n and never move again.  A layer
L_n contains every node with z(v) <= 2^n and every rail with z(r) = 2^n;
carried-forward subdivisions keep rail geometry point-identical across
layers, which is what makes zooming stable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import NodeBoundary, Rect, collinear_within, snap_eps_for
from .ingest import RankedGraph
from .mesh import InputSegment, generate_mesh
from .overlap import OverlapField
from .routing import Router
from .tilemap import TileMap


class LayerCapError(Exception):
    """Ran out of layers before assigning every node."""


class BuildParamError(ValueError):
    pass


@dataclass
class BuildParams:
    qn: int = 80
    qr: int = 180
    initial_node_size: float | None = None  # default: min bbox extent / 40
    rail_discount: float = 0.8
    max_layers: int = 24
    force_final_layer: bool = False
    bitmap_max_px: int = 4096
    min_angle: float = 20.0
    refine: bool = False

    def validate(self) -> None:
        for name, q in (("Q_N", self.qn), ("Q_R", self.qr)):
            if q < 4 or q % 4 != 0:
                raise BuildParamError(f"{name} must be a positive multiple of 4, got {q}")
        if not (0.0 < self.rail_discount <= 1.0):
            raise BuildParamError("rail_discount must be in (0, 1]")
        if self.max_layers < 1:
            raise BuildParamError("max_layers must be at least 1")


@dataclass
class Rail:
    rid: int
    x1: float
    y1: float
    x2: float
    y2: float
    level: int  # z(r) = 2**level
    parent: int  # rid of the covering maximal rail; == rid when maximal
    edge_ids: set[int] = field(default_factory=set)

    @property
    def is_maximal(self) -> bool:
        return self.parent == self.rid

    @property
    def coords(self) -> tuple[float, float, float, float]:
        return (self.x1, self.y1, self.x2, self.y2)


@dataclass
class EdgeRoute:
    edge_id: int
    level: int
    points: list[tuple[float, float]]  # polyline, source boundary to target boundary


@dataclass
class Layer:
    level: int
    node_ids: list[int]  # every v with z(v) <= 2^level, in importance order
    rail_ids: list[int]  # rails with z(r) == 2^level
    node_radius: float
    stop_rank: int | None  # rank position that tripped the rail quota, if any


@dataclass
class LayerSet:
    graph: RankedGraph
    params: BuildParams
    bbox: Rect
    snap_eps: float
    initial_radius: float
    positions: np.ndarray  # (N, 2) final positions, identical in every layer
    z_exp: np.ndarray  # (N,) exponent n with z(v) = 2^n
    layers: list[Layer]
    rails: list[Rail]
    edge_routes: dict[int, EdgeRoute]
    forced_final: bool = False

    @property
    def edge_list(self) -> list[tuple[int, int]]:
        return self.graph.edges

    def node_radius(self, level: int) -> float:
        return self.initial_radius / (2**level)

    def maximal_rails_upto(self, level: int) -> list[Rail]:
        return [r for r in self.rails if r.is_maximal and r.level <= level]


def find_maximal_rails(
    new_rails: list[tuple[float, float, float, float]],
    maximal_set: list[tuple[float, float, float, float]],
    tol: float,
) -> list[tuple[float, float, float, float]]:
    """Subset of new_rails not covered (as sub-segments) by the maximal set.

    Pure geometric form of the check; the build loop itself decides
    coverage from mesh subdivision provenance and uses this as an
    assertion.
    """
    out = []
    for seg in new_rails:
        covered = False
        for m in maximal_set:
            if collinear_within(seg[0], seg[1], seg[2], seg[3], m[0], m[1], m[2], m[3], tol):
                covered = True
                break
        if not covered:
            out.append(seg)
    return out


class _SegmentGrid:
    """Coarse spatial hash over maximal rails, for the coverage assertion."""

    def __init__(self, bbox: Rect):
        self.cell = max(bbox.w, bbox.h) / 64.0 or 1.0
        self.x0, self.y0 = bbox.x, bbox.y
        self.cells: dict[tuple[int, int], list[int]] = {}

    def _range(self, x1, y1, x2, y2):
        ja = int((min(x1, x2) - self.x0) // self.cell)
        jb = int((max(x1, x2) - self.x0) // self.cell)
        ia = int((min(y1, y2) - self.y0) // self.cell)
        ib = int((max(y1, y2) - self.y0) // self.cell)
        return ja, jb, ia, ib

    def add(self, rid: int, coords) -> None:
        ja, jb, ia, ib = self._range(*coords)
        for i in range(ia, ib + 1):
            for j in range(ja, jb + 1):
                self.cells.setdefault((i, j), []).append(rid)

    def near(self, coords) -> list[int]:
        ja, jb, ia, ib = self._range(*coords)
        out: list[int] = []
        for i in range(ia, ib + 1):
            for j in range(ja, jb + 1):
                out.extend(self.cells.get((i, j), ()))
        return out


class _BuildState:
    def __init__(self, graph: RankedGraph, params: BuildParams):
        params.validate()
        if graph.position_incomplete:
            raise BuildParamError("graph is position-incomplete; supply positions or run fallback_layout")
        self.graph = graph
        self.params = params
        self.order = np.asarray(graph.order, dtype=np.int64)
        self.rank_of = np.empty(graph.n, dtype=np.int64)
        self.rank_of[self.order] = np.arange(graph.n)
        self.r0 = params.initial_node_size or graph.default_node_radius()
        self.bbox = graph.bbox(self.r0)
        self.eps = snap_eps_for(self.bbox)
        self.pos = graph.positions.copy()
        self.z_exp = np.full(graph.n, -1, dtype=np.int64)
        self.rails: list[Rail] = []
        self.maximal_ids: list[int] = []
        self.maximal_grid = _SegmentGrid(self.bbox)
        self.edge_routes: dict[int, EdgeRoute] = {}
        self.adj: list[list[tuple[int, int]]] = [[] for _ in range(graph.n)]
        for eid, (u, v) in enumerate(graph.edges):
            self.adj[u].append((v, eid))
            self.adj[v].append((u, eid))

    def assigned_in_rank_order(self) -> list[int]:
        return [int(v) for v in self.order if self.z_exp[v] >= 0]

    def unassigned_in_rank_order(self) -> list[int]:
        return [int(v) for v in self.order if self.z_exp[v] < 0]

    def new_rail(self, x1, y1, x2, y2, level, parent=None) -> Rail:
        rid = len(self.rails)
        rail = Rail(rid, x1, y1, x2, y2, level, parent if parent is not None else rid)
        self.rails.append(rail)
        if rail.is_maximal:
            self.maximal_ids.append(rid)
            self.maximal_grid.add(rid, rail.coords)
        return rail


def build_layers(graph: RankedGraph, params: BuildParams | None = None) -> LayerSet:
    """Run the full layer assignment; see the module docstring."""
    params = params or BuildParams()
    st = _BuildState(graph, params)
    layers: list[Layer] = []
    forced = False
    n = 0
    while st.unassigned_in_rank_order():
        if n >= params.max_layers:
            if not params.force_final_layer:
                raise LayerCapError(
                    f"{len(st.unassigned_in_rank_order())} nodes left after "
                    f"{params.max_layers} layers; raise max_layers or pass force_final_layer"
                )
            # All remaining nodes land here; quota guarantees are void on
            # this layer and the verifier reports it.
            layers.append(process_layer(st, n, force=True))
            forced = True
            break
        layers.append(process_layer(st, n))
        n += 1

    return LayerSet(
        graph=graph,
        params=params,
        bbox=st.bbox,
        snap_eps=st.eps,
        initial_radius=st.r0,
        positions=st.pos,
        z_exp=st.z_exp,
        layers=layers,
        rails=st.rails,
        edge_routes=st.edge_routes,
        forced_final=forced,
    )


def process_layer(st: _BuildState, n: int, force: bool = False) -> Layer:
    """One round of the build; returns the finished layer record.

    With ``force`` set, quotas are ignored and every remaining node is
    committed (the caller records that guarantees are void).
    """
    params = st.params
    radius = st.r0 / (2**n)
    qn4 = params.qn // 4
    qr4 = params.qr // 4

    # 1. Overlap field seeded with everything already fixed at this level.
    movable = st.unassigned_in_rank_order()
    assigned = st.assigned_in_rank_order()
    field = OverlapField(st.bbox, radius, params.bitmap_max_px)
    for v in assigned:
        field.stamp_fixed_disk(st.pos[v, 0], st.pos[v, 1], radius)
    for rid in st.maximal_ids:
        field.stamp_fixed_segment(*st.rails[rid].coords)

    # 2. Tile counters seeded with what is already visible at this level.
    tm = TileMap(st.bbox, n)
    for v in assigned:
        tm.add_node(st.pos[v, 0], st.pos[v, 1], radius)
    for rid in st.maximal_ids:
        tm.add_rail(*st.rails[rid].coords)

    # 3. Candidate scan in importance order: each node is first moved off
    #    occupied space, then tested against the per-tile node quota.  The
    #    first failure (or a saturated bitmap) ends the scan; nodes beyond
    #    it keep their old positions and wait for the next layer.
    candidates: list[int] = []
    for v in movable:
        placed = field.place(st.pos[v, 0], st.pos[v, 1])
        if placed is None:
            break
        if force or tm.node_fits(placed[0], placed[1], radius, qn4):
            st.pos[v] = placed
            field.stamp_candidate(*placed)
            tm.add_node(placed[0], placed[1], radius)
            candidates.append(v)
        else:
            break

    # 4. Mesh over all current boundaries plus the previous layer's rails.
    present = sorted(assigned + candidates, key=lambda v: st.rank_of[v])
    boundaries = [
        NodeBoundary.octagon(st.pos[v, 0], st.pos[v, 1], radius, st.eps) for v in present
    ]
    corner_of = {}
    prev_rails = [r for r in st.rails if r.level == n - 1]
    fixed_segments = [
        InputSegment(0, r.x1, r.y1, r.x2, r.y2, "rail", r.rid) for r in prev_rails
    ]
    mesh = generate_mesh(boundaries, fixed_segments, st.eps, params.min_angle, params.refine)
    for i, v in enumerate(present):
        corner_of[v] = mesh.boundary_corners[i]

    # 5. Carry the previous layer's rails forward, subdivided by this mesh.
    edge2rail: dict[int, int] = {}
    layer_rail_ids: list[int] = []
    onrail = np.zeros(len(mesh.edge_verts), dtype=np.uint8)
    for seg in mesh.segments:
        if seg.kind != "rail":
            continue
        prev = st.rails[seg.ref]
        for e in mesh.segment_children[seg.cid]:
            if e in edge2rail:
                raise AssertionError("mesh edge covered by two distinct prior rails")
            a, b = mesh.edge_verts[e]
            rail = st.new_rail(
                float(mesh.verts[a, 0]),
                float(mesh.verts[a, 1]),
                float(mesh.verts[b, 0]),
                float(mesh.verts[b, 1]),
                n,
                parent=prev.parent,
            )
            rail.edge_ids = set(prev.edge_ids)
            edge2rail[e] = rail.rid
            onrail[e] = 1
            layer_rail_ids.append(rail.rid)

    # 6. Insert candidates; the first rail-quota violation ends the round.
    router = Router(mesh)
    stop_rank: int | None = None
    for v in candidates:
        neighbors = sorted(
            ((int(st.rank_of[u]), u, eid) for u, eid in st.adj[v] if st.z_exp[u] >= 0),
            key=lambda t: t[0],
        )
        routes: list[tuple[int, list[int], list[int]]] = []
        fresh: list[int] = []
        fresh_seen = set()
        for _, u, eid in neighbors:
            path, _cost = router.route(corner_of[v], corner_of[u], params.rail_discount, onrail)
            p_edges = router.path_edges(path)
            routes.append((eid, path, p_edges))
            for e in p_edges:
                if e not in edge2rail and e not in fresh_seen:
                    fresh_seen.add(e)
                    fresh.append(e)
        fresh.sort()
        segs = []
        for e in fresh:
            a, b = mesh.edge_verts[e]
            segs.append(
                (
                    float(mesh.verts[a, 0]),
                    float(mesh.verts[a, 1]),
                    float(mesh.verts[b, 0]),
                    float(mesh.verts[b, 1]),
                )
            )
        _assert_fresh_are_maximal(st, segs)
        if not force and not tm.rails_fit(segs, qr4):
            stop_rank = int(st.rank_of[v])
            break
        st.z_exp[v] = n
        for (x1, y1, x2, y2), e in zip(segs, fresh):
            rail = st.new_rail(x1, y1, x2, y2, n)
            edge2rail[e] = rail.rid
            onrail[e] = 1
            tm.add_rail(x1, y1, x2, y2)
            layer_rail_ids.append(rail.rid)
        for eid, path, p_edges in routes:
            for e in p_edges:
                st.rails[edge2rail[e]].edge_ids.add(eid)
            pts = [(float(mesh.verts[p, 0]), float(mesh.verts[p, 1])) for p in path]
            st.edge_routes[eid] = EdgeRoute(eid, n, pts)

    node_ids = st.assigned_in_rank_order()
    return Layer(
        level=n,
        node_ids=node_ids,
        rail_ids=layer_rail_ids,
        node_radius=radius,
        stop_rank=stop_rank,
    )


def _assert_fresh_are_maximal(st: _BuildState, segs) -> None:
    """Provenance says these segments are new; confirm geometrically."""
    tol = st.eps
    for seg in segs:
        for rid in st.maximal_grid.near(seg):
            m = st.rails[rid]
            if collinear_within(seg[0], seg[1], seg[2], seg[3], m.x1, m.y1, m.x2, m.y2, tol):
                raise AssertionError(
                    f"mesh provenance missed coverage: segment {seg} inside rail {rid}"
                )
