import pytest

from exceptions import DuplicateEdge, MalformedInput, NonPlanarEmbedding, NotBidirectional
from planar_complex import (
    PlanarComplex,
    boundary_complex,
    build_complex,
    decompose_to_admissible,
    is_admissible,
    signed_area,
)

SQUARE = {0: (0.0, 0.0), 1: (1.0, 0.0), 2: (1.0, 1.0), 3: (0.0, 1.0)}


def test_square_has_one_counterclockwise_face(unit_square):
    assert unit_square.num_faces == 1
    assert signed_area(unit_square.face_polygon(0)) == pytest.approx(1.0)
    assert is_admissible(unit_square)
    assert unit_square.euler_characteristic() == 2


def test_boundary_complex_runs_counterclockwise(unit_square):
    bc = boundary_complex(unit_square)
    assert len(bc) == 4
    assert bc.vertices == frozenset(SQUARE)
    for arc in bc.edges:
        assert unit_square.left_face(arc) == 0
    heads = [arc.head for arc in bc.edges]
    tails = [arc.tail for arc in bc.edges]
    assert heads == tails[1:] + tails[:1]


def test_grid_faces(grid_2x2):
    assert grid_2x2.num_faces == 4
    assert grid_2x2.graph.num_edges == 12
    assert len(boundary_complex(grid_2x2)) == 8
    assert all(signed_area(grid_2x2.face_polygon(f)) > 0 for f in range(4))
    assert grid_2x2.euler_characteristic() == 2


def test_oriented_input_needs_both_directions():
    pairs = [(0, 1), (1, 0), (1, 2), (2, 1), (2, 3), (3, 2), (3, 0), (0, 3)]
    c = build_complex(SQUARE, pairs, oriented=True)
    assert c.graph.num_edges == 4

    with pytest.raises(NotBidirectional):
        build_complex(SQUARE, pairs[:-1], oriented=True)


def test_duplicate_edge_is_rejected():
    with pytest.raises(DuplicateEdge):
        build_complex(SQUARE, [(0, 1), (1, 0), (1, 2)])


def test_crossing_diagonals_are_rejected():
    with pytest.raises(NonPlanarEmbedding):
        build_complex(SQUARE, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2), (1, 3)])


def test_overlapping_collinear_edges_are_rejected():
    coords = {0: (0.0, 0.0), 1: (2.0, 0.0), 2: (1.0, 0.0), 3: (3.0, 0.0)}
    with pytest.raises(NonPlanarEmbedding):
        build_complex(coords, [(0, 1), (2, 3)])


def test_loops_and_unknown_vertices_are_malformed():
    with pytest.raises(MalformedInput):
        build_complex(SQUARE, [(0, 0)])
    with pytest.raises(MalformedInput):
        build_complex(SQUARE, [(0, 9)])


def test_tree_is_not_admissible():
    c = build_complex({0: (0.0, 0.0), 1: (1.0, 0.0), 2: (2.0, 1.0)}, [(0, 1), (1, 2)])
    assert c.num_faces == 0
    assert not is_admissible(c)
    assert decompose_to_admissible(c) == []


def test_pendant_edge_is_dropped_by_decomposition():
    coords = dict(SQUARE)
    coords[4] = (2.0, 0.0)
    c = build_complex(coords, [(0, 1), (1, 2), (2, 3), (3, 0), (1, 4)])
    assert not is_admissible(c)
    parts = decompose_to_admissible(c)
    assert len(parts) == 1
    assert parts[0].graph.num_edges == 4
    assert is_admissible(parts[0])


def test_document_round_trip(grid_2x2):
    data = grid_2x2.to_dict()
    again = PlanarComplex.from_dict(data)
    assert again.graph.edges == grid_2x2.graph.edges
    assert again.to_dict()["faces"] == data["faces"]
    assert len(data["boundary"]) == 8


def test_malformed_document():
    with pytest.raises(MalformedInput):
        PlanarComplex.from_dict({"vertices": [{"id": 0}], "edges": []})
