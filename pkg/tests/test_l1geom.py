import pytest

from ip_trees import Arc, GeometryError, L1Point, is_on_root_path, path_distance, span_arcs, wedge
from ip_trees.ipt_l1geom import relabel_map


def pt(*pairs):
    return L1Point(tuple(pairs))


def test_wedge_stops_at_first_differing_axis():
    x = pt((1, 0.5), (2, 0.3))
    y = pt((1, 0.5), (3, 0.2))
    assert wedge(x, y) == pt((1, 0.5))


def test_wedge_takes_smaller_value_on_shared_axis():
    x = pt((1, 0.3))
    y = pt((1, 0.7), (2, 0.1))
    assert wedge(x, y) == pt((1, 0.3))
    assert wedge(y, x) == pt((1, 0.3))


def test_wedge_of_prefix_is_the_prefix():
    x = pt((1, 0.5))
    y = pt((1, 0.5), (2, 0.1))
    assert wedge(x, y) == x
    assert wedge(x, L1Point.origin()).is_origin


def test_root_path_membership():
    w = pt((1, 0.5), (2, 1.0))
    assert is_on_root_path(L1Point.origin(), w)
    assert is_on_root_path(pt((1, 0.2)), w)
    assert is_on_root_path(pt((1, 0.5), (2, 0.5)), w)
    assert is_on_root_path(w, w)
    assert not is_on_root_path(pt((1, 0.6)), w)
    assert not is_on_root_path(pt((2, 0.1)), w)
    assert not is_on_root_path(pt((1, 0.5), (3, 0.1)), w)


def test_path_distance_goes_through_the_wedge():
    x = pt((1, 0.5), (2, 0.3))
    y = pt((1, 0.5), (3, 0.2))
    assert path_distance(x, y) == pytest.approx(0.5)
    assert path_distance(x, x) == 0.0
    assert path_distance(L1Point.origin(), x) == pytest.approx(0.8)


def test_point_validation():
    with pytest.raises(GeometryError):
        pt((2, 0.5), (1, 0.5))
    with pytest.raises(GeometryError):
        pt((1, 0.0))
    with pytest.raises(GeometryError):
        pt((0, 1.0))
    assert L1Point.from_pairs([[1, 0.0], [3, 0.25]]) == pt((3, 0.25))


def test_with_coordinate_only_extends_the_last_axis():
    x = pt((1, 0.5), (3, 0.2))
    assert x.with_coordinate(3, 0.4) == pt((1, 0.5), (3, 0.4))
    assert x.with_coordinate(5, 0.1) == pt((1, 0.5), (3, 0.2), (5, 0.1))
    with pytest.raises(GeometryError) as excinfo:
        x.with_coordinate(2, 0.1)
    assert "below the last axis" in str(excinfo.value)


def test_arc_geometry():
    arc = Arc(L1Point.origin(), L1Point.basis(1, 0.5), 1)
    assert arc.length == 0.5
    assert arc.contains(pt((1, 0.25)))
    assert not arc.contains(pt((1, 0.75)))
    assert arc.point_at(0.25) == pt((1, 0.25))
    assert arc.point_at(0.0).is_origin
    with pytest.raises(GeometryError):
        arc.point_at(0.6)


def test_arc_must_be_axis_parallel():
    with pytest.raises(GeometryError) as excinfo:
        Arc(pt((1, 0.5)), pt((2, 0.3)), 2)
    assert "axis-parallel" in str(excinfo.value)
    with pytest.raises(GeometryError):
        Arc(pt((1, 0.5)), pt((1, 0.5)), 1)


def test_span_arcs_split_at_every_node():
    arcs = span_arcs([pt((1, 1.0)), pt((1, 0.5), (2, 0.5))])
    assert arcs == [
        Arc(L1Point.origin(), pt((1, 0.5)), 1),
        Arc(pt((1, 0.5)), pt((1, 1.0)), 1),
        Arc(pt((1, 0.5)), pt((1, 0.5), (2, 0.5)), 2),
    ]
    assert span_arcs([L1Point.origin()]) == []


def test_relabel_map_must_increase():
    assert relabel_map([1, 2], {1: 2, 2: 4, 9: 9}) == {1: 2, 2: 4}
    with pytest.raises(GeometryError):
        relabel_map([1, 2], {1: 3, 2: 3})
    with pytest.raises(GeometryError):
        relabel_map([1, 2], {1: 3})
    assert pt((1, 0.5), (2, 0.1)).relabel({1: 2, 2: 4}) == pt((2, 0.5), (4, 0.1))
