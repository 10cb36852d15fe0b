import pytest

from dual import dual_hypotheses, dualize, pull_form, push_form
from exceptions import NotAdmissible
from forms import VertexFunction, curl, differential, divergence
from generators import random_admissible_complex, random_form
from planar_complex import boundary_complex, build_complex


def test_square_dual(unit_square):
    dual = dualize(unit_square)
    assert dual.num_faces == 1
    assert dual.interior == frozenset({0})
    assert dual.boundary == frozenset({1, 2, 3, 4})
    assert dual.graph.num_edges == 4
    for arc in boundary_complex(unit_square).edges:
        a, b = dual.graph.edges[arc.edge]
        assert {a, b} == {0, dual.boundary_vertex(arc)}


def test_curl_equals_dual_divergence(rng):
    for _ in range(25):
        c = random_admissible_complex(rng)
        alpha = random_form(rng, c.graph)
        dual = dualize(c)
        div = divergence(push_form(alpha, dual))
        face_curl = curl(alpha, c)
        for f in range(c.num_faces):
            assert face_curl[f] == pytest.approx(div[f], abs=1e-12)


def test_push_pull_round_trip(grid_2x2, rng):
    alpha = random_form(rng, grid_2x2.graph)
    dual = dualize(grid_2x2)
    back = pull_form(push_form(alpha, dual), dual)
    assert back.values == alpha.values
    assert dual.primal_arc(dual.dual_arc(grid_2x2.graph.arc(3, -1))) == grid_2x2.graph.arc(3, -1)


def test_dual_boundary_data_match_primal_boundary(unit_square):
    arcs = boundary_complex(unit_square).edges
    u = VertexFunction({arc.tail: k / 4 for k, arc in enumerate(arcs)})
    alpha = differential(u, unit_square.graph).projected()
    dual = dualize(unit_square)
    report = dual_hypotheses(push_form(alpha, dual), dual)
    assert abs(report["flux"]) == pytest.approx(1.0)
    assert report["tv"] == pytest.approx(1.0)
    assert report["h2"] and not report["h1"]


def test_tree_has_no_dual():
    c = build_complex({0: (0.0, 0.0), 1: (1.0, 0.0)}, [(0, 1)])
    with pytest.raises(NotAdmissible):
        dualize(c)


def test_dual_document(grid_2x2):
    data = dualize(grid_2x2).to_dict()
    assert len(data["vertices"]) == 4 + 8
    assert sum(1 for v in data["vertices"] if v["boundary"]) == 8
    assert len(data["edges"]) == 12
