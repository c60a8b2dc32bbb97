"""graphatlas: compile a node-positioned graph into a zoom pyramid of
layers, rails and tiles that can be browsed like an online map."""

from .export import Dataset, DatasetError, export, load_dataset, stats
from .geometry import NodeBoundary, Rect
from .ingest import RankedGraph, fallback_layout, parse_dot, rank_nodes, to_dot
from .labeling import LabelPlan, plan_labels
from .layers import BuildParams, LayerSet, Rail, build_layers, find_maximal_rails
from .mesh import ConstraintCrossingError, InputSegment, Mesh, MeshError, generate_mesh
from .overlap import remove_overlaps
from .routing import Router, RoutingError, route
from .tilemap import TileMap, count_tile_intersections
from .verify import layer_index, verify_quotas, visible_set, zoom_level

__version__ = "0.1.0"

__all__ = [
    "BuildParams",
    "ConstraintCrossingError",
    "Dataset",
    "DatasetError",
    "export",
    "load_dataset",
    "stats",
    "InputSegment",
    "LabelPlan",
    "LayerSet",
    "Mesh",
    "MeshError",
    "NodeBoundary",
    "Rail",
    "RankedGraph",
    "Rect",
    "Router",
    "RoutingError",
    "TileMap",
    "build_layers",
    "count_tile_intersections",
    "fallback_layout",
    "find_maximal_rails",
    "generate_mesh",
    "layer_index",
    "parse_dot",
    "plan_labels",
    "rank_nodes",
    "remove_overlaps",
    "route",
    "to_dot",
    "verify_quotas",
    "visible_set",
    "zoom_level",
]
