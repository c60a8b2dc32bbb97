"""On-disk dataset: JSON vector layers plus pre-rendered hint tiles.

Layout (the wire contract consumed by the viewer and the verifier):

    meta.json                 bbox, quotas, per-layer radii, node catalog,
                              edge list, tile spec, hint threshold
    layers/<n>/nodes.json     nodes of L_n (cumulative): id, label, x, y, z
    layers/<n>/rails.json     rails with z(r) = 2^n: geometry, maximal
                              ancestor id, edge ids, most-important edge
    labels.json               label plan (level + side per node)
    routes.json               per-edge route polylines (for highlighting)
    tiles/<n>/<i>_<j>.png     raster hints of not-yet-visible nodes, only
                              where more than `threshold` such nodes sit

Raster tiles are rendered by recursing down the quadtree: a tile's node
subset is split among its four children, so each node is touched once per
level instead of once per tile.  All bytes are deterministic for a fixed
input.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, ImageColor, ImageDraw

from .geometry import Rect
from .labeling import LabelPlan
from .layers import LayerSet

FORMAT = "graphatlas-dataset@1"
DEFAULT_PALETTE = ("#4878a8", "#a85148", "#58a868", "#a88a48", "#7a58a8", "#48a0a8")


class DatasetError(Exception):
    pass


def _dump(obj, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(obj, f, sort_keys=True, separators=(",", ":"))
        f.write("\n")


def export(
    layers: LayerSet,
    labels: LabelPlan,
    out_dir: str | os.PathLike,
    threshold: int = 60,
    tile_px: int = 256,
) -> "Dataset":
    """Write the dataset directory; returns the loaded result."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    g = layers.graph
    k = len(layers.layers) - 1

    meta = {
        "format": FORMAT,
        "bbox": {"x": layers.bbox.x, "y": layers.bbox.y, "w": layers.bbox.w, "h": layers.bbox.h},
        "layer_count": len(layers.layers),
        "qn": layers.params.qn,
        "qr": layers.params.qr,
        "node_radius": [layers.node_radius(n) for n in range(len(layers.layers))],
        "initial_radius": layers.initial_radius,
        "snap_eps": layers.snap_eps,
        "tile_px": tile_px,
        "hint_threshold": threshold,
        "forced_final": layers.forced_final,
        "nodes": [
            {
                "id": g.ids[v],
                "label": g.labels[v],
                "x": float(layers.positions[v, 0]),
                "y": float(layers.positions[v, 1]),
                "z": int(layers.z_exp[v]),
            }
            for v in range(g.n)
        ],
        "edges": [[int(u), int(v)] for u, v in g.edges],
        "order": [int(v) for v in g.order],
    }
    _dump(meta, out / "meta.json")

    rank_of = np.empty(g.n, dtype=np.int64)
    rank_of[np.asarray(g.order)] = np.arange(g.n)

    for layer in layers.layers:
        nodes = [
            {
                "id": int(v),
                "label": g.labels[v],
                "x": float(layers.positions[v, 0]),
                "y": float(layers.positions[v, 1]),
                "z": int(layers.z_exp[v]),
            }
            for v in layer.node_ids
        ]
        _dump(nodes, out / "layers" / str(layer.level) / "nodes.json")
        rails = []
        for rid in layer.rail_ids:
            r = layers.rails[rid]
            rails.append(
                {
                    "id": r.rid,
                    "x1": r.x1,
                    "y1": r.y1,
                    "x2": r.x2,
                    "y2": r.y2,
                    "z": 2**r.level,
                    "max": r.parent,
                    "edges": sorted(r.edge_ids),
                    "top_edge": _top_edge(r.edge_ids, g.edges, rank_of),
                }
            )
        _dump(rails, out / "layers" / str(layer.level) / "rails.json")

    _dump(
        {
            "font_height": labels.font_height,
            "char_width_ratio": labels.char_width_ratio,
            "delta0": labels.delta0,
            "delta": labels.delta,
            "items": [
                {"id": v, "level": float(labels.levels[v]), "side": labels.positions[v]}
                for v in range(g.n)
            ],
        },
        out / "labels.json",
    )

    _dump(
        {
            str(eid): {"level": er.level, "points": [[x, y] for x, y in er.points]}
            for eid, er in sorted(layers.edge_routes.items())
        },
        out / "routes.json",
    )

    _render_hint_tiles(layers, out, threshold, tile_px)
    return load_dataset(out)


def _top_edge(edge_ids: set[int], edges: list[tuple[int, int]], rank_of: np.ndarray) -> int | None:
    """Most important edge through a rail: best (then second-best) endpoint rank."""
    best = None
    for eid in sorted(edge_ids):
        u, v = edges[eid]
        key = tuple(sorted((int(rank_of[u]), int(rank_of[v]))))
        if best is None or key < best[0]:
            best = (key, eid)
    return best[1] if best else None


def _node_color(attrs: dict[str, str]) -> str | None:
    c = attrs.get("color") or attrs.get("fillcolor")
    if not c:
        return None
    try:
        ImageColor.getrgb(c)
        return c
    except ValueError:
        return None


def _render_hint_tiles(layers: LayerSet, out: Path, threshold: int, tile_px: int) -> None:
    g = layers.graph
    bbox = layers.bbox
    deepest = len(layers.layers) - 1
    # Node screen radius is constant across levels by construction.
    rx = layers.initial_radius * tile_px / bbox.w
    ry = layers.initial_radius * tile_px / bbox.h
    colors = []
    for v in range(g.n):
        c = _node_color(g.node_attrs[v]) or DEFAULT_PALETTE[v % len(DEFAULT_PALETTE)]
        rgb = ImageColor.getrgb(c)
        colors.append((rgb[0], rgb[1], rgb[2], 102))  # 40% opacity hint

    def render(n: int, i: int, j: int, subset: list[int]) -> None:
        if not subset:
            return
        if len(subset) > threshold:
            tw, th = bbox.w / 2**n, bbox.h / 2**n
            x0, y0 = bbox.x + j * tw, bbox.y + i * th
            img = Image.new("RGBA", (tile_px, tile_px), (0, 0, 0, 0))
            draw = ImageDraw.Draw(img)
            for v in subset:
                px = (layers.positions[v, 0] - x0) / tw * tile_px
                py = (1.0 - (layers.positions[v, 1] - y0) / th) * tile_px
                draw.ellipse((px - rx, py - ry, px + rx, py + ry), fill=colors[v])
            path = out / "tiles" / str(n) / f"{i}_{j}.png"
            path.parent.mkdir(parents=True, exist_ok=True)
            img.save(path, format="PNG")
        if n >= deepest:
            return
        m = n + 1
        tw, th = bbox.w / 2**m, bbox.h / 2**m
        kids: dict[tuple[int, int], list[int]] = {}
        for v in subset:
            if layers.z_exp[v] <= m:
                continue
            jj = min(int((layers.positions[v, 0] - bbox.x) / tw), 2**m - 1)
            ii = min(int((layers.positions[v, 1] - bbox.y) / th), 2**m - 1)
            kids.setdefault((ii, jj), []).append(v)
        for (ii, jj) in sorted(kids):
            render(m, ii, jj, kids[(ii, jj)])

    residual = [v for v in range(g.n) if layers.z_exp[v] > 0]
    render(0, 0, 0, residual)


@dataclass
class LayerData:
    level: int
    nodes: list[dict]
    rails: list[dict]


@dataclass
class Dataset:
    root: Path
    meta: dict
    layers: list[LayerData]
    labels: dict
    routes: dict
    tiles: set[tuple[int, int, int]]  # (n, i, j) raster keys present

    @property
    def bbox(self) -> Rect:
        b = self.meta["bbox"]
        return Rect(b["x"], b["y"], b["w"], b["h"])

    @property
    def layer_count(self) -> int:
        return int(self.meta["layer_count"])

    def node_radius(self, level: int) -> float:
        return float(self.meta["node_radius"][level])

    def rail_by_id(self) -> dict[int, dict]:
        out = {}
        for layer in self.layers:
            for r in layer.rails:
                out[r["id"]] = r
        return out


def load_dataset(path: str | os.PathLike) -> Dataset:
    root = Path(path)
    meta_path = root / "meta.json"
    if not meta_path.exists():
        raise DatasetError(f"not a dataset: missing {meta_path}")
    meta = json.loads(meta_path.read_text())
    if meta.get("format") != FORMAT:
        raise DatasetError(f"unsupported dataset format {meta.get('format')!r}")
    layers = []
    for n in range(int(meta["layer_count"])):
        ldir = root / "layers" / str(n)
        try:
            nodes = json.loads((ldir / "nodes.json").read_text())
            rails = json.loads((ldir / "rails.json").read_text())
        except FileNotFoundError as exc:
            raise DatasetError(f"dataset missing layer file: {exc.filename}") from None
        layers.append(LayerData(level=n, nodes=nodes, rails=rails))
    labels = json.loads((root / "labels.json").read_text())
    routes = json.loads((root / "routes.json").read_text())
    tiles = set()
    tdir = root / "tiles"
    if tdir.exists():
        for sub in sorted(tdir.iterdir()):
            if not sub.is_dir():
                continue
            for f in sorted(sub.iterdir()):
                if f.suffix == ".png":
                    i, j = f.stem.split("_")
                    tiles.add((int(sub.name), int(i), int(j)))
    return Dataset(root=root, meta=meta, layers=layers, labels=labels, routes=routes, tiles=tiles)


def validate(ds: Dataset) -> None:
    """Structural checks; raises DatasetError naming the first failure."""
    if ds.layer_count != len(ds.layers):
        raise DatasetError("layer_count does not match layer files")
    n_nodes = len(ds.meta["nodes"])
    prev_ids: set[int] = set()
    for layer in ds.layers:
        ids = {nd["id"] for nd in layer.nodes}
        if not prev_ids <= ids:
            raise DatasetError(f"layer {layer.level} is missing nodes of layer {layer.level - 1}")
        prev_ids = ids
        for nd in layer.nodes:
            z = nd["z"]
            if not (isinstance(z, int) and 0 <= z < ds.layer_count):
                raise DatasetError(f"node {nd['id']} z out of range: {z}")
            if z > layer.level:
                raise DatasetError(f"node {nd['id']} (z=2^{z}) listed in layer {layer.level}")
        expect_z = 2**layer.level
        for r in layer.rails:
            z = r["z"]
            if z <= 0 or 2 ** int(math.log2(z)) != z:
                raise DatasetError(f"rail {r['id']} z not power of two: {z}")
            if z != expect_z:
                raise DatasetError(f"rail {r['id']} z {z} does not match layer {layer.level}")
    rails = ds.rail_by_id()
    for rid, r in rails.items():
        m = r["max"]
        if m not in rails:
            raise DatasetError(f"rail {rid} maximal ancestor {m} unresolvable")
        if rails[m]["max"] != m:
            raise DatasetError(f"rail {rid} ancestor {m} is not maximal")
    items = ds.labels["items"]
    if len(items) != n_nodes:
        raise DatasetError("label plan does not cover all nodes")
    for it in items:
        z = ds.meta["nodes"][it["id"]]["z"]
        if it["level"] < 2**z:
            raise DatasetError(f"label level below node zoom for node {it['id']}")
    if not (ds.bbox.w > 0 and ds.bbox.h > 0):
        raise DatasetError("bbox is degenerate")


def stats(ds: Dataset) -> dict:
    """Per-layer summary plus quota headroom; validates first."""
    validate(ds)
    from . import verify as _verify

    per_layer = []
    lemma = _verify.lemma_tile_maxima(ds)
    for layer in ds.layers:
        nmax, rmax = lemma[layer.level]
        per_layer.append(
            {
                "level": layer.level,
                "nodes": len(layer.nodes),
                "rails": len(layer.rails),
                "max_tile_nodes": nmax,
                "max_tile_rails": rmax,
            }
        )
    tile_bytes = 0
    for n, i, j in ds.tiles:
        tile_bytes += (ds.root / "tiles" / str(n) / f"{i}_{j}.png").stat().st_size
    vector_bytes = sum(
        f.stat().st_size for f in ds.root.rglob("*.json")
    )
    return {
        "layers": per_layer,
        "layer_count": ds.layer_count,
        "node_count": len(ds.meta["nodes"]),
        "edge_count": len(ds.meta["edges"]),
        "qn": ds.meta["qn"],
        "qr": ds.meta["qr"],
        "node_quota_per_tile": ds.meta["qn"] // 4,
        "rail_quota_per_tile": ds.meta["qr"] // 4,
        "raster_tiles": len(ds.tiles),
        "raster_bytes": tile_bytes,
        "vector_bytes": vector_bytes,
        "forced_final": ds.meta["forced_final"],
    }
