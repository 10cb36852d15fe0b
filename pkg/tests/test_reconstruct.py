import math

import pytest

from exceptions import NonzeroCurl, PreconditionViolated
from forms import OneForm, VertexFunction, curl, differential, project_pi
from generators import grid_complex, random_admissible_complex, random_vertex_function
from reconstruct import (
    cut_open_along_path,
    integrate_along_walk,
    integrate_curl_free,
    reconstruct_with_singularity,
    spanning_walk,
)


def winding_datum():
    """Angle about the grid centre in turns; the centre itself is 0"""
    values = {}
    for ix in range(3):
        for iy in range(3):
            if (ix, iy) == (1, 1):
                values[3 * ix + iy] = 0.0
            else:
                values[3 * ix + iy] = (math.atan2(iy - 1, ix - 1) / (2 * math.pi)) % 1.0
    return VertexFunction(values)


@pytest.fixture
def winding(grid_2x2):
    u = winding_datum()
    alpha = differential(u, grid_2x2.graph).projected()
    charge = curl(alpha, grid_2x2)
    (f0,) = charge.nonzero()
    return u, alpha, f0


def test_integration_recovers_the_function(rng):
    for _ in range(10):
        c = random_admissible_complex(rng)
        u = random_vertex_function(rng, c.vertices, scale=3.0)
        v0 = c.vertices[0]
        again = integrate_curl_free(c, (v0, u[v0]), differential(u, c.graph))
        assert max(abs(again[v] - u[v]) for v in c.vertices) <= 1e-9


def test_walk_agrees_with_tree(grid_2x2, rng):
    u = random_vertex_function(rng, grid_2x2.vertices)
    alpha = differential(u, grid_2x2.graph)
    by_tree = integrate_curl_free(grid_2x2, (4, 0.0), alpha)
    by_walk = integrate_along_walk(grid_2x2.graph, (4, 0.0), alpha)
    assert by_walk.values == pytest.approx(by_tree.values)

    walk = spanning_walk(grid_2x2.graph, 4)
    assert walk[0].tail == 4 and walk[-1].head == 4
    assert {arc.head for arc in walk} == set(grid_2x2.vertices)


def test_curl_is_rejected(grid_2x2, winding):
    _, alpha, _ = winding
    with pytest.raises(NonzeroCurl) as info:
        integrate_curl_free(grid_2x2, (0, 0.0), alpha)
    assert info.value.clause == "curl"
    with pytest.raises(NonzeroCurl):
        integrate_along_walk(grid_2x2.graph, (0, 0.0), alpha)


def test_winding_datum_has_one_charged_face(grid_2x2, winding):
    _, alpha, f0 = winding
    charge = curl(alpha, grid_2x2)
    assert charge[f0] == pytest.approx(1.0)
    assert set(grid_2x2.face_vertices(f0)) == {0, 1, 3, 4}


@pytest.mark.parametrize("pair", [(6, 7), (7, 6)])
def test_reconstruction_around_a_vortex(grid_2x2, winding, pair):
    u, alpha, f0 = winding
    e0 = grid_2x2.graph.find_arc(*pair)
    result = reconstruct_with_singularity(grid_2x2, u, alpha, f0, e0)
    for v in (0, 1, 2, 3, 5, 6, 7, 8):
        assert result[v] == pytest.approx(u[v], abs=1e-12)
    for e, (a, b) in grid_2x2.graph.edges.items():
        assert project_pi(result[b] - result[a]) == pytest.approx(alpha.values[e], abs=1e-12)
    assert result[4] - u[4] == pytest.approx(round(result[4] - u[4]), abs=1e-12)


def test_curl_free_form_is_integrated_directly(grid_2x2):
    u = VertexFunction({v: 0.1 for v in grid_2x2.vertices})
    alpha = differential(u, grid_2x2.graph)
    e0 = grid_2x2.graph.find_arc(6, 7)
    result = reconstruct_with_singularity(grid_2x2, u, alpha, 0, e0)
    assert all(x == pytest.approx(0.1) for x in result.values.values())


def test_reconstruction_preconditions(grid_2x2, winding):
    u, alpha, f0 = winding
    e0 = grid_2x2.graph.find_arc(6, 7)

    with pytest.raises(PreconditionViolated) as info:
        reconstruct_with_singularity(grid_2x2, u, alpha, 99, e0)
    assert info.value.clause == "f0"

    with pytest.raises(PreconditionViolated) as info:
        reconstruct_with_singularity(grid_2x2, u, alpha * 3.0, f0, e0)
    assert info.value.clause == "range"

    with pytest.raises(PreconditionViolated) as info:
        reconstruct_with_singularity(grid_2x2, u, alpha, f0, grid_2x2.graph.find_arc(3, 4))
    assert info.value.clause == "e0"

    with pytest.raises(PreconditionViolated) as info:
        reconstruct_with_singularity(grid_2x2, u, alpha, f0, grid_2x2.graph.find_arc(7, 8))
    assert info.value.clause == "h0"

    other = next(f for f in range(grid_2x2.num_faces) if f != f0)
    with pytest.raises(NonzeroCurl):
        reconstruct_with_singularity(grid_2x2, u, alpha, other, e0)


# 4 × 4 vertices, id 4 * ix + iy. The centre face winds once and all four of
# its edges sit exactly on ±1/2.
RINGED = {
    (1, 1): 0.0, (2, 1): 0.5, (2, 2): 1.0, (1, 2): 1.5,
    (0, 1): 0.05, (0, 0): 0.1, (1, 0): 0.2, (2, 0): 0.4,
    (3, 0): 0.55, (3, 1): 0.7, (3, 2): 0.9, (3, 3): 1.05,
    (2, 3): 1.15, (1, 3): 1.3, (0, 3): 1.4, (0, 2): 1.5,
}


@pytest.fixture
def ringed():
    c = grid_complex(None, 3, 3)
    u = VertexFunction({4 * ix + iy: x for (ix, iy), x in RINGED.items()})
    alpha = differential(u, c.graph).projected()
    return c, u, alpha


def test_ringed_face_carries_half_values(ringed):
    c, _, alpha = ringed
    (f0,) = curl(alpha, c).nonzero()
    assert set(c.face_vertices(f0)) == {5, 6, 9, 10}
    assert curl(alpha, c)[f0] == pytest.approx(1.0)
    assert all(abs(alpha(arc)) == pytest.approx(0.5) for arc in c.faces[f0])


def test_cut_open_duplicates_a_primal_path(ringed):
    c, _, alpha = ringed
    (f0,) = curl(alpha, c).nonzero()
    e0 = c.graph.find_arc(2, 1)

    cut = cut_open_along_path(c, alpha, f0, e0, 1)
    assert cut.path == (2, 6)
    assert cut.copies == {16: 2, 17: 6}
    assert {(a.tail, a.head) for a in cut.shifted} == {(2, 1), (6, 5)}
    assert cut.graph.num_vertices == 18
    assert cut.graph.num_edges == c.graph.num_edges + 1


def test_reconstruction_through_half_valued_ring(ringed):
    c, u, alpha = ringed
    (f0,) = curl(alpha, c).nonzero()
    result = reconstruct_with_singularity(c, u, alpha, f0, c.graph.find_arc(2, 1))
    assert result.values == pytest.approx(u.values, abs=1e-12)
    for e, (a, b) in c.graph.edges.items():
        assert project_pi(result[b] - result[a]) == pytest.approx(alpha.values[e], abs=1e-12)


def test_reconstruction_when_e0_touches_the_singular_face(unit_square):
    u = VertexFunction({0: 0.0, 1: 0.5, 2: 1.0, 3: 1.5})
    alpha = differential(u, unit_square.graph).projected()
    result = reconstruct_with_singularity(unit_square, u, alpha, 0, unit_square.graph.find_arc(3, 0))
    assert result.values == pytest.approx(u.values, abs=1e-12)


def test_cut_fails_when_the_tie_has_the_wrong_sign():
    # two unit cells; the shared edge holds +1/2 on the singular cell's side
    c = grid_complex(None, 2, 1)
    alpha = OneForm.from_pairs(
        c.graph,
        {(0, 2): 0.2, (2, 3): 0.5, (3, 1): 0.2, (1, 0): 0.1, (2, 4): 0.2, (4, 5): 0.1, (5, 3): 0.2},
    )
    u = VertexFunction({0: 0.0, 2: 0.2, 4: 0.4, 5: -0.5, 3: -0.3, 1: -0.1})
    f0 = next(f for f in range(c.num_faces) if set(c.face_vertices(f)) == {0, 1, 2, 3})
    assert curl(alpha, c)[f0] == pytest.approx(1.0)

    with pytest.raises(PreconditionViolated) as info:
        reconstruct_with_singularity(c, u, alpha, f0, c.graph.find_arc(4, 5))
    assert info.value.clause == "cut"
