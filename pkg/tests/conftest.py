from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from graphatlas.export import export, load_dataset
from graphatlas.ingest import parse_dot, rank_nodes
from graphatlas.labeling import plan_labels
from graphatlas.layers import BuildParams, build_layers

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def abstract_dot_path() -> Path:
    return DATA / "abstract.dot"


@pytest.fixture(scope="session")
def abstract_layers(abstract_dot_path):
    g = parse_dot(abstract_dot_path.read_text())
    g.order = rank_nodes(g, "pagerank")
    layers = build_layers(g, BuildParams(qn=80, qr=180))
    return layers


@pytest.fixture(scope="session")
def abstract_dataset(abstract_layers, tmp_path_factory):
    out = tmp_path_factory.mktemp("abstract_ds")
    labels = plan_labels(abstract_layers)
    return export(abstract_layers, labels, out)


@pytest.fixture(scope="session")
def k2_dataset(tmp_path_factory):
    g = parse_dot('graph { a [pos="0,0"]; b [pos="10,0"]; a -- b; }')
    g.order = rank_nodes(g, "degree")
    layers = build_layers(g, BuildParams(qn=80, qr=180))
    labels = plan_labels(layers)
    out = tmp_path_factory.mktemp("k2_ds")
    return export(layers, labels, out)
