import numpy as np
import pytest

from graphatlas.geometry import Rect, snap_eps_for
from graphatlas.ingest import parse_dot, rank_nodes
from graphatlas.layers import (
    BuildParamError,
    BuildParams,
    LayerCapError,
    build_layers,
    find_maximal_rails,
)
from fixture_graphs import preferential_graph, star_graph
from oracles import simulate_node_quota_layers


def build(dot, qn=80, qr=180, **kw):
    g = parse_dot(dot)
    g.order = rank_nodes(g, kw.pop("rank", "degree"))
    return build_layers(g, BuildParams(qn=qn, qr=qr, **kw))


def test_k2_single_layer():
    ls = build('graph { a [pos="0,0"]; b [pos="10,0"]; a -- b; }')
    assert len(ls.layers) == 1
    assert ls.layers[0].node_ids == [0, 1]
    assert len(ls.layers[0].rail_ids) >= 1
    assert 0 in ls.edge_routes


def test_quota_params_validated():
    dot = 'graph { a [pos="0,0"]; b [pos="10,0"]; a -- b; }'
    with pytest.raises(BuildParamError):
        build(dot, qn=6)
    with pytest.raises(BuildParamError):
        build(dot, qr=0)


def test_position_incomplete_rejected():
    g = parse_dot("graph { a; b; a -- b; }")
    g.order = rank_nodes(g, "input")
    with pytest.raises(BuildParamError):
        build_layers(g, BuildParams())


def test_star_graph_matches_node_quota_oracle():
    # Node size small so overlap removal keeps positions, rail quota huge
    # so rails never stop a layer: the candidate scan is then a pure
    # tile-counting process the oracle can replicate exactly.
    dot = star_graph(100)
    g = parse_dot(dot)
    g.order = rank_nodes(g, "input")
    params = BuildParams(qn=8, qr=10000, initial_node_size=0.5)
    ls = build_layers(g, params)
    bbox = g.bbox(0.5)
    expect = simulate_node_quota_layers(g.positions, g.order, bbox, 0.5, 8)
    got = [L.node_ids for L in ls.layers]
    assert got == expect
    assert len(got[0]) == 2  # single tile at level 0, quota 8/4 = 2
    sizes = [len(x) for x in got]
    assert sizes == sorted(sizes)  # leaf count per layer grows as tiles shrink


def test_candidate_without_edges_commits_without_rails():
    # second-ranked node has no edge to the first: still committed
    dot = 'graph { a [pos="0,0"]; b [pos="30,0"]; c [pos="15,20"]; a -- c; }'
    g = parse_dot(dot)
    g.order = rank_nodes(g, "input")
    ls = build_layers(g, BuildParams(qn=80, qr=180))
    assert ls.layers[0].node_ids == [0, 1, 2]


def test_find_maximal_rails_unit_cases():
    tol = 1e-9
    maximal = [(0.0, 0.0, 10.0, 0.0)]
    assert find_maximal_rails([(0.0, 0.0, 10.0, 0.0)], maximal, tol) == []
    assert find_maximal_rails([(0.0, 0.0, 5.0, 0.0)], maximal, tol) == []
    kept = find_maximal_rails([(10.0, 0.0, 15.0, 5.0)], maximal, tol)
    assert kept == [(10.0, 0.0, 15.0, 5.0)]


def test_layer_cap_error_and_forced_final():
    # Brutal quotas force one node per layer; 6 nodes exceed 3 layers.
    dot = preferential_graph(6, 8, seed=5, spread=40.0)
    with pytest.raises(LayerCapError):
        build(dot, qn=4, qr=4, max_layers=3)
    ls = build(dot, qn=4, qr=4, max_layers=3, force_final_layer=True)
    assert ls.forced_final
    assert (ls.z_exp >= 0).all()
    assert len(ls.layers) == 4  # 3 regular plus the forced final


def invariant_check(ls):
    """The cross-cutting layer invariants, asserted on any built LayerSet."""
    g = ls.graph
    rank_of = np.empty(g.n, dtype=np.int64)
    rank_of[np.asarray(g.order)] = np.arange(g.n)
    # MONOTONICITY: z nondecreasing along the importance order
    z_in_order = [int(ls.z_exp[v]) for v in g.order]
    assert z_in_order == sorted(z_in_order)
    # membership rule and cumulative layers
    for layer in ls.layers:
        expect = [int(v) for v in g.order if ls.z_exp[v] <= layer.level]
        assert layer.node_ids == expect
    # COVERAGE EQUALITY: maximal rails cover all rails, per accumulated level
    eps = ls.snap_eps
    for layer in ls.layers:
        max_set = [r.coords for r in ls.maximal_rails_upto(layer.level)]
        new = [ls.rails[rid].coords for rid in layer.rail_ids]
        assert find_maximal_rails(new, max_set, eps * 4) == []
    # rails of layer n-1 covered by rails of layer n (point sets)
    for prev, cur in zip(ls.layers, ls.layers[1:]):
        cur_coords = [ls.rails[rid].coords for rid in cur.rail_ids]
        prev_coords = [ls.rails[rid].coords for rid in prev.rail_ids]
        assert find_maximal_rails(prev_coords, cur_coords, eps * 4) == []


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_layer_invariants_on_random_graphs(seed):
    dot = preferential_graph(30, 45, seed=seed, clusters=2)
    ls = build(dot, qn=16, qr=48, rank="pagerank")
    invariant_check(ls)


def test_rail_edge_attribution_recorded():
    ls = build('graph { a [pos="0,0"]; b [pos="10,0"]; c [pos="5,8"]; a -- b; b -- c; }')
    touched = set()
    for rail in ls.rails:
        touched |= rail.edge_ids
    assert touched == {0, 1}
