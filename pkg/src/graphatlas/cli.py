"""Command line entry point.

Subcommands: ``build`` (dot file -> dataset), ``verify`` (quota checks),
``stats`` (dataset report), ``serve`` (local HTTP).  Exit codes: 1 bad
parameters, 2 input parse, 3 geometry, 4 layer cap, 5 I/O.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import _kernels
from .export import DatasetError, export, load_dataset, stats
from .ingest import DotSyntaxError, EmptyGraphError, fallback_layout, parse_dot, rank_nodes
from .labeling import LabelingError, plan_labels
from .layers import BuildParamError, BuildParams, LayerCapError, build_layers
from .mesh import MeshError
from .overlap import OverlapError
from .server import make_server
from .verify import sample_viewports, verify_quotas, visible_set

EXIT_PARAMS = 1
EXIT_PARSE = 2
EXIT_GEOMETRY = 3
EXIT_LAYER_CAP = 4
EXIT_IO = 5


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="graphatlas", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)

    b = sub.add_parser("build", help="compile a DOT graph into a layered dataset")
    b.add_argument("input", help="DOT file with pos attributes")
    b.add_argument("out_dir", help="dataset output directory")
    b.add_argument("--qn", type=int, default=80, help="node quota (default 80)")
    b.add_argument("--qr", type=int, default=180, help="rail quota (default 180)")
    b.add_argument("--rank", choices=("input", "degree", "pagerank"), default="pagerank")
    b.add_argument("--node-size", type=float, default=None, help="initial node radius, graph units")
    b.add_argument("--rail-discount", type=float, default=0.8)
    b.add_argument("--max-layers", type=int, default=24)
    b.add_argument("--force-final-layer", action="store_true")
    b.add_argument("--seed", type=int, default=0, help="seed for the fallback layout")
    b.add_argument("--layout", action="store_true", help="layout graphs without positions")
    b.add_argument("--threshold", type=int, default=60, help="raster hint threshold")
    b.add_argument("--tile-px", type=int, default=256)
    b.add_argument("--refine", action="store_true", help="refine mesh to the minimum angle")
    b.add_argument("--min-angle", type=float, default=20.0)

    v = sub.add_parser("verify", help="check quota guarantees of a dataset")
    v.add_argument("dataset")
    v.add_argument("--samples", type=int, default=10000)
    v.add_argument("--seed", type=int, default=7)
    v.add_argument("--json", dest="json_out", default=None, help="write machine report here")
    v.add_argument(
        "--dump-samples",
        default=None,
        help="write the first N sampled viewports with their visible id sets",
    )
    v.add_argument("--dump-count", type=int, default=100)

    s = sub.add_parser("stats", help="summarize a dataset")
    s.add_argument("dataset")
    s.add_argument("--json", dest="json_out", action="store_true")

    sv = sub.add_parser("serve", help="serve a dataset (and the viewer) over HTTP")
    sv.add_argument("dataset")
    sv.add_argument("--port", type=int, default=8000)
    sv.add_argument("--host", default="127.0.0.1")
    sv.add_argument("--viewer", default=None, help="viewer bundle directory (frontend/dist)")
    return p


def cmd_build(args) -> int:
    try:
        params = BuildParams(
            qn=args.qn,
            qr=args.qr,
            initial_node_size=args.node_size,
            rail_discount=args.rail_discount,
            max_layers=args.max_layers,
            force_final_layer=args.force_final_layer,
            refine=args.refine,
            min_angle=args.min_angle,
        )
        params.validate()
    except BuildParamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAMS

    try:
        text = Path(args.input).read_text()
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc}", file=sys.stderr)
        return EXIT_IO

    try:
        graph = parse_dot(text)
    except (DotSyntaxError, EmptyGraphError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE

    if graph.position_incomplete:
        if not args.layout:
            print(
                "error: graph is position-incomplete (some nodes lack pos); pass --layout",
                file=sys.stderr,
            )
            return EXIT_PARSE
        graph.positions = fallback_layout(graph, seed=args.seed)

    graph.order = rank_nodes(graph, args.rank)

    try:
        layers = build_layers(graph, params)
        labels = plan_labels(layers)
    except LayerCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LAYER_CAP
    except (MeshError, OverlapError, LabelingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY

    try:
        ds = export(layers, labels, args.out_dir, threshold=args.threshold, tile_px=args.tile_px)
    except OSError as exc:
        print(f"error: cannot write dataset: {exc}", file=sys.stderr)
        return EXIT_IO

    print(f"kernel backend: {_kernels.BACKEND}")
    print(f"dataset: {args.out_dir}")
    for layer in layers.layers:
        stop = f" (rail quota stop at rank {layer.stop_rank})" if layer.stop_rank is not None else ""
        print(
            f"  layer {layer.level}: {len(layer.node_ids)} nodes, "
            f"{len(layer.rail_ids)} rails{stop}"
        )
    if layers.forced_final:
        print("  NOTE: final layer was forced; quota guarantees void there")
    print(f"  raster hint tiles: {len(ds.tiles)}")
    return 0


def cmd_verify(args) -> int:
    try:
        ds = load_dataset(args.dataset)
    except (DatasetError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    report = verify_quotas(ds, samples=args.samples, seed=args.seed)
    print(f"samples: {report.samples}  seed: {report.seed}")
    print(f"lemma (per-tile) maxima by level: {report.lemma_maxima}")
    print(
        f"viewport maxima: nodes {report.max_nodes_seen}/{ds.meta['qn']},"
        f" rail cover {report.max_rail_cover_seen}/{ds.meta['qr']}"
    )
    if report.forced_final:
        print("forced final layer present: its violations are permitted and flagged")
    print("OK" if report.ok else f"VIOLATIONS: {len(report.violations)}")
    for v in report.violations[:10]:
        print(f"  {v}")
    if args.json_out:
        Path(args.json_out).write_text(json.dumps(report.to_json(), indent=2, sort_keys=True))
    if args.dump_samples:
        dump = []
        for vp in sample_viewports(ds, args.dump_count, args.seed):
            nodes, rails, rmax = visible_set(ds, vp)
            dump.append(
                {
                    "viewport": {"x": vp.x, "y": vp.y, "w": vp.w, "h": vp.h},
                    "nodes": nodes,
                    "rails": rails,
                    "rail_cover": rmax,
                }
            )
        Path(args.dump_samples).write_text(json.dumps(dump, sort_keys=True, separators=(",", ":")))
    return 0 if report.ok else 1


def cmd_stats(args) -> int:
    try:
        ds = load_dataset(args.dataset)
        report = stats(ds)
    except (DatasetError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    if args.json_out:
        print(json.dumps(report, indent=2, sort_keys=True))
        return 0
    print(f"dataset: {args.dataset}")
    print(
        f"nodes: {report['node_count']}  edges: {report['edge_count']}  "
        f"layers: {report['layer_count']}  rasters: {report['raster_tiles']}"
    )
    print(f"quotas: Q_N={report['qn']} ({report['node_quota_per_tile']}/tile), Q_R={report['qr']} ({report['rail_quota_per_tile']}/tile)")
    for L in report["layers"]:
        print(
            f"  layer {L['level']}: {L['nodes']} nodes, {L['rails']} rails, "
            f"max tile nodes {L['max_tile_nodes']}, max tile rails {L['max_tile_rails']}"
        )
    print(f"bytes: vector {report['vector_bytes']}, raster {report['raster_bytes']}")
    return 0


def cmd_serve(args) -> int:
    try:
        ds = load_dataset(args.dataset)
    except (DatasetError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    viewer = args.viewer
    if viewer is None:
        guess = Path(__file__).resolve().parents[2].parent / "frontend" / "dist"
        if guess.is_dir():
            viewer = str(guess)
    try:
        httpd = make_server(args.dataset, viewer, port=args.port, host=args.host)
    except OSError as exc:
        print(f"error: cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return EXIT_IO
    where = f"http://{args.host}:{httpd.server_address[1]}/"
    print(f"serving {args.dataset} at {where}" + (f" (viewer at {where}viewer/)" if viewer else ""))
    try:
        httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.cmd == "build":
        return cmd_build(args)
    if args.cmd == "verify":
        return cmd_verify(args)
    if args.cmd == "stats":
        return cmd_stats(args)
    if args.cmd == "serve":
        return cmd_serve(args)
    return EXIT_PARAMS


if __name__ == "__main__":
    sys.exit(main())
