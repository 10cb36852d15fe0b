import math
from fractions import Fraction

import numpy as np
import pytest

from exceptions import EmptyDiscretization, H0Unsatisfiable, MalformedInput, NotStarShaped
from forms import VertexFunction
from lattice import (
    Disk,
    EnergyProfile,
    LatticeDomain,
    Polygon,
    Relaxer,
    boundary_variation,
    circulation,
    constant_boundary,
    discretize,
    domain_from_spec,
    enclosed_charge,
    energy,
    lattice_hypotheses,
    lift_boundary,
    profile_from_spec,
    star_boundary,
    vorticity,
)


@pytest.fixture
def square_quarter():
    return discretize(Polygon.square(1), 0.25)


def fill(u0, lattice, rng=None):
    values = {v: float(rng.uniform(0, 1)) if rng is not None else 0.0 for v in range(lattice.num_vertices)}
    values.update(u0.values)
    return VertexFunction(values)


def two_by_two(centre):
    """Zero boundary except 1/2 at the top middle; ids are 3 * ix + iy"""
    lattice = LatticeDomain.from_cells(1, [(0, 0), (1, 0), (0, 1), (1, 1)])
    values = {v: 0.0 for v in range(9)}
    values[lattice.vertex_at(1, 2)] = 0.5
    values[lattice.vertex_at(1, 1)] = centre
    return lattice, VertexFunction(values)


def test_square_discretization():
    lattice = discretize(domain_from_spec("square:1"), Fraction(1, 2))
    assert len(lattice.cells) == 16
    assert lattice.num_vertices == 25
    assert len(lattice.boundary_cycle) == 16
    assert len(lattice.interior_vertices) == 9
    assert lattice.points[lattice.boundary_vertices[0]] == (-2, -2)


def test_disk_keeps_cells_with_all_corners_inside():
    lattice = discretize(Disk(radius=1), 0.5)
    assert sorted(lattice.cells) == [(-1, -1), (-1, 0), (0, -1), (0, 0)]


@pytest.mark.parametrize(
    "spec, bounds",
    [
        ("square:2", (-2, -2, 2, 2)),
        ("square:0,2,0,1", (0, 0, 2, 1)),
        ("disk:3", (-3, -3, 3, 3)),
        ("disk:1,1,0.5", (0.5, 0.5, 1.5, 1.5)),
        ("polygon:0,0;2,0;0,1", (0, 0, 2, 1)),
    ],
)
def test_domain_specs(spec, bounds):
    assert tuple(float(x) for x in domain_from_spec(spec).bounds()) == bounds


@pytest.mark.parametrize("spec", ["hexagon:1", "square:a", "square:1,2", "polygon:0,0;1,0", "disk:0"])
def test_bad_domain_specs(spec):
    with pytest.raises(MalformedInput):
        domain_from_spec(spec)


def test_empty_and_invalid_discretizations():
    with pytest.raises(EmptyDiscretization):
        discretize(Polygon.square(Fraction(1, 10)), 1)
    with pytest.raises(MalformedInput):
        discretize(Polygon.square(1), 0)


def test_lattice_document_round_trip(square_quarter):
    again = LatticeDomain.from_dict(square_quarter.to_dict())
    assert again.cells == square_quarter.cells
    assert again.boundary_cycle == square_quarter.boundary_cycle
    with pytest.raises(MalformedInput):
        LatticeDomain.from_dict({"cells": []})


def test_dipole_states_share_the_same_energy():
    sd = EnergyProfile.sd()
    lattice, charged = two_by_two(-0.125)
    _, minimal = two_by_two(0.125)
    assert energy(charged, lattice, sd) == pytest.approx(11 / 16)
    assert energy(minimal, lattice, sd) == pytest.approx(11 / 16)

    measure = vorticity(charged, lattice)
    assert measure.total == 0
    assert len(measure.support()) == 2
    assert enclosed_charge(charged, lattice, (0, 1), (1, 2)) == -1
    assert enclosed_charge(charged, lattice, (1, 1), (2, 2)) == 1
    assert vorticity(minimal, lattice).support() == []
    assert list(measure.to_frame()["charge"].sort_values()) == [-1, 1]


def test_xy_energy_is_bounded_by_sd(square_quarter, rng):
    for _ in range(5):
        u = VertexFunction({v: float(x) for v, x in enumerate(rng.uniform(0, 1, square_quarter.num_vertices))})
        sd = energy(u, square_quarter, EnergyProfile.sd())
        xy = energy(u, square_quarter, EnergyProfile.xy())
        assert sd >= xy / (2 * math.pi ** 2) - 1e-12


def test_circulation_counts_enclosed_charge(square_quarter, rng):
    for _ in range(10):
        u = VertexFunction({v: float(x) for v, x in enumerate(rng.uniform(0, 1, square_quarter.num_vertices))})
        for lo, hi in [((-4, -4), (4, 4)), ((-2, -3), (1, 2)), ((0, 0), (1, 1))]:
            cycle = square_quarter.rectangle_cycle(lo, hi)
            assert circulation(u, cycle) == pytest.approx(enclosed_charge(u, square_quarter, lo, hi), abs=1e-9)


def test_star_boundary_has_degree_one(square_quarter):
    u0 = star_boundary(lambda t: t, square_quarter, rays=400)
    report = lattice_hypotheses(u0, square_quarter)
    assert report.boundary_sum == pytest.approx(1.0)
    assert report.h0_ok and report.h2_ok
    assert report.failing_clause() is None
    assert boundary_variation(u0, square_quarter) == pytest.approx(1.0)


@pytest.mark.parametrize(
    "domain",
    [
        domain_from_spec("square:1,2,1,2"),
        domain_from_spec("polygon:-1,-1;3,-1;3,3;2,3;2,1;-1,1"),
    ],
)
def test_star_boundary_needs_a_star_domain(domain):
    lattice = discretize(domain, 0.5)
    with pytest.raises(NotStarShaped) as info:
        star_boundary(lambda t: t, lattice, rays=400)
    assert info.value.clause == "star-shaped"


def test_lifted_radial_field(square_quarter):
    u0 = lift_boundary(lambda x, y: complex(x, y) / abs(complex(x, y)), square_quarter)
    report = lattice_hypotheses(u0, square_quarter)
    assert report.boundary_sum == pytest.approx(1.0)
    assert report.h2_ok


def test_lift_checks_the_modulus(square_quarter):
    with pytest.raises(H0Unsatisfiable) as info:
        lift_boundary(lambda x, y: complex(x, y), square_quarter, modulus=lambda d: 10 * d)
    assert info.value.clause == "H0"
    with pytest.raises(MalformedInput):
        lift_boundary(lambda x, y: 0j, square_quarter)


def test_constant_boundary_satisfies_h1(square_quarter):
    report = lattice_hypotheses(constant_boundary(square_quarter, 0.3), square_quarter)
    assert report.h1_ok and report.boundary_sum == 0.0


def test_relaxation_never_raises_energy(square_quarter, rng):
    sd = EnergyProfile.sd()
    u0 = star_boundary(lambda t: t, square_quarter, rays=400)
    u = fill(u0, square_quarter, rng)
    relaxer = Relaxer()
    relaxed = relaxer.solve(u, square_quarter, sd, sweeps=3)
    history = relaxer.history
    assert all(b <= a + 1e-12 for a, b in zip(history, history[1:]))
    assert history[-1] < history[0]
    assert all(relaxed[v] == u[v] for v in square_quarter.boundary_vertices)


def test_profiles(tmp_path):
    assert profile_from_spec("sd")(np.array([0.5])).tolist() == [0.25]
    assert profile_from_spec("xy")(np.array([0.5])).tolist() == pytest.approx([2.0])

    table = tmp_path / "ramp.csv"
    table.write_text("t,f\n0,0\n0.5,1\n")
    ramp = profile_from_spec(f"custom:{table}")
    assert ramp.name == "ramp"
    assert float(ramp(np.array([0.25]))[0]) == pytest.approx(0.5)

    doc = tmp_path / "step.json"
    doc.write_text('{"t": [0, 0.25, 0.5], "f": [0, 1, 1]}')
    assert float(profile_from_spec(f"custom:{doc}")(np.array([0.4]))[0]) == pytest.approx(1.0)


@pytest.mark.parametrize(
    "make",
    [
        lambda: profile_from_spec("quadratic"),
        lambda: EnergyProfile("falling", lambda t: -t),
        lambda: EnergyProfile.from_samples([0.0, 0.0], [0.0, 1.0]),
        lambda: profile_from_spec("custom:/nonexistent/profile.csv"),
    ],
)
def test_bad_profiles(make):
    with pytest.raises(MalformedInput):
        make()
