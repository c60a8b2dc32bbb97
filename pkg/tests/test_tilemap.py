from graphatlas.geometry import Rect
from graphatlas.tilemap import TileMap, count_tile_intersections


TILE = Rect(0, 0, 10, 10)


def test_node_centered_in_tile():
    assert count_tile_intersections(TILE, ("node", 5, 5, 1))


def test_rail_touching_corner_counts():
    # passes exactly through the corner point (10, 10)
    assert count_tile_intersections(TILE, ("rail", 9, 11, 11, 9))


def test_node_disk_clear_of_tile():
    assert not count_tile_intersections(TILE, ("node", 12.5, 5, 1))


def test_node_disk_touching_edge_counts():
    assert count_tile_intersections(TILE, ("node", 11, 5, 1))


def test_tilemap_counts_and_quota():
    tm = TileMap(Rect(0, 0, 16, 16), level=1)  # 2x2 tiles of 8x8
    tm.add_node(4, 4, 1)
    tm.add_node(4, 5, 1)
    assert not tm.node_fits(5, 4, 1, per_tile_quota=2)
    assert tm.node_fits(12, 12, 1, per_tile_quota=2)
    # node overlapping the internal boundary counts in both tiles
    tm2 = TileMap(Rect(0, 0, 16, 16), level=1)
    tm2.add_node(8, 4, 1)
    assert tm2.nodes == {(0, 0): 1, (0, 1): 1}


def test_rails_fit_counts_each_tile_once_per_rail():
    tm = TileMap(Rect(0, 0, 16, 16), level=1)
    segs = [(1.0, 1.0, 15.0, 1.0)]  # spans both bottom tiles
    assert tm.rails_fit(segs, per_tile_quota=1)
    tm.add_rail(*segs[0])
    assert tm.rails == {(0, 0): 1, (0, 1): 1}
    assert not tm.rails_fit([(2.0, 2.0, 14.0, 2.0)], per_tile_quota=1)
