import json

import pytest

from exceptions import HypothesisViolated, MalformedInput
from forms import OneForm, VertexFunction
from generators import pipeline_instance, random_profile
from lattice import EnergyProfile, LatticeDomain, Polygon, discretize, energy, star_boundary, vorticity
from pipeline import DipolePipeline, complex_energy, edgewise_ratio, face_charges, run
from planar_complex import boundary_complex


def two_by_two(top, centre):
    """Zero boundary except ``top`` at the top middle; ids are 3 * ix + iy"""
    lattice = LatticeDomain.from_cells(1, [(0, 0), (1, 0), (0, 1), (1, 1)])
    values = {v: 0.0 for v in range(9)}
    values[lattice.vertex_at(1, 2)] = top
    values[lattice.vertex_at(1, 1)] = centre
    return lattice, VertexFunction(values)


def boundary_of(c):
    return {arc.tail for arc in boundary_complex(c).edges}


def test_constant_input_is_unchanged(grid_2x2):
    u = VertexFunction({v: 0.3 for v in grid_2x2.vertices})
    u_tilde, report = run(grid_2x2, u)
    assert u_tilde.values == u.values
    assert report.max_ratio == 0.0
    assert report.singular_face is None
    assert report.total_vorticity == 0


def test_dipole_pair_is_removed():
    lattice, charged = two_by_two(0.5, -0.125)
    c = lattice.complex
    assert sorted(k for k in face_charges(charged, c).values() if k) == [-1, 1]
    assert complex_energy(charged, c, EnergyProfile.sd()) == pytest.approx(energy(charged, lattice, EnergyProfile.sd()))

    u_tilde, report = run(c, charged)
    assert report.certificate["method"] == "zero_flux"
    assert not any(report.vorticity_after.values())
    assert report.energy_decreased()
    assert vorticity(u_tilde, lattice).support() == []
    assert all(u_tilde[v] == charged[v] for v in boundary_of(c))


def test_strict_decrease_below_unit_variation():
    lattice, charged = two_by_two(0.4, -0.2)
    c = lattice.complex
    assert sorted(k for k in face_charges(charged, c).values() if k) == [-1, 1]
    u_tilde, report = run(c, charged)
    assert report.hypotheses.h1_strict
    assert report.strict_edges
    assert report.certificate["witness"] is not None
    assert report.energies["sd"]["after"] < report.energies["sd"]["before"]


def test_one_vortex_survives():
    lattice = discretize(Polygon.square(1), 0.25)
    u0 = star_boundary(lambda t: t, lattice, rays=400)
    u = VertexFunction({v: u0.values.get(v, 0.0) for v in range(lattice.num_vertices)})
    u_tilde, report = run(lattice.complex, u)
    assert report.certificate["method"] == "unit_flux"
    assert report.singular_face is not None
    assert report.total_vorticity == 1
    assert [f for f, k in report.vorticity_after.items() if k] == [report.singular_face]
    assert vorticity(u_tilde, lattice).total == 1
    assert all(u_tilde[v] == u[v] for v in lattice.boundary_vertices)
    assert report.max_ratio <= 1 + 1e-9
    assert report.energy_decreased()


def test_boundary_clauses(unit_square):
    arcs = boundary_complex(unit_square).edges
    two_jumps = VertexFunction({arc.tail: x for arc, x in zip(arcs, [0.0, 0.7, 0.0, 0.7])})
    with pytest.raises(HypothesisViolated) as info:
        run(unit_square, two_jumps)
    assert info.value.clause == "h0"

    too_rough = VertexFunction({arc.tail: x for arc, x in zip(arcs, [0.0, 0.4, 0.0, 0.4])})
    with pytest.raises(HypothesisViolated) as info:
        run(unit_square, too_rough)
    assert info.value.clause == "h1/h2"


def test_missing_vertex_is_malformed(grid_2x2):
    u = VertexFunction({v: 0.0 for v in grid_2x2.vertices if v != 4})
    with pytest.raises(MalformedInput):
        run(grid_2x2, u)


def test_second_pass_keeps_output_vortex_free():
    lattice, charged = two_by_two(0.5, -0.125)
    pipeline = DipolePipeline()
    once, _ = pipeline.solve(lattice.complex, charged)
    twice, report = pipeline.solve(lattice.complex, once)
    assert report.total_vorticity == 0
    assert not any(report.vorticity_before.values())
    assert report.max_ratio <= 1 + 1e-9
    assert all(twice[v] == charged[v] for v in lattice.boundary_vertices)


@pytest.mark.parametrize("flux", [0, 1, -1])
def test_generated_round_trips(rng, flux):
    pipeline = DipolePipeline()
    for _ in range(8):
        c, u = pipeline_instance(rng, flux=flux, max_faces=20)
        u_tilde, report = pipeline.solve(c, u)
        assert all(u_tilde[v] == u[v] for v in boundary_of(c))
        assert report.round_trip_error <= 1e-9
        assert report.max_ratio <= 1 + 1e-9
        assert report.energy_decreased()
        assert report.total_vorticity == flux


def test_report_document(rng):
    c, u = pipeline_instance(rng, flux=1, max_faces=12)
    _, report = run(c, u, profiles=[random_profile(rng)])
    data = json.loads(json.dumps(report.to_dict()))
    assert set(data["energies"]) == {"sd", "xy", "random"}
    assert data["hypotheses"]["h2_ok"] is True
    assert data["singular_face"] == report.singular_face
    assert sum(data["vorticity_after"].values()) == 1


def test_edgewise_ratio(unit_square):
    g = unit_square.graph
    before = OneForm(g, {0: 0.4, 1: -0.2, 2: 0.0, 3: 0.1})
    after = OneForm(g, {0: 0.2, 1: -0.2, 2: 0.0, 3: -0.1})
    assert edgewise_ratio(before, after) == (1.0, [0])
    ratio, _ = edgewise_ratio(before, OneForm(g, {0: 0.0, 1: 0.0, 2: 0.3, 3: 0.0}))
    assert ratio == float("inf")
