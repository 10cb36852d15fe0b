import json

import pandas as pd
import pytest

from exceptions import MalformedInput
from forms import VertexFunction
from lattice import LatticeDomain
from scenario import (
    Scenario,
    load_complex,
    load_lattice,
    load_scenario,
    read_json,
    save_scenario,
    write_json,
    write_table,
)


@pytest.fixture
def lattice():
    return LatticeDomain.from_cells(0.5, [(0, 0), (1, 0), (0, 1), (1, 1)])


def test_scenario_round_trip(tmp_path, lattice):
    u = VertexFunction({v: v / 10 for v in range(lattice.num_vertices)})
    path = save_scenario(Scenario(u=u, lattice=lattice, profile="xy"), tmp_path / "vortex.json")
    again = load_scenario(path)
    assert again.name == "vortex"
    assert again.profile == "xy"
    assert again.u.values == u.values
    assert again.lattice.cells == lattice.cells
    assert again.complex.graph.edges == lattice.complex.graph.edges


def test_complex_scenario(tmp_path, grid_2x2):
    u = VertexFunction({v: 0.0 for v in grid_2x2.vertices})
    path = save_scenario(Scenario(u=u, planar=grid_2x2), tmp_path / "grid.json")
    again = load_scenario(path)
    assert again.lattice is None
    assert again.complex.num_faces == 4
    assert load_complex(path).graph.num_edges == 12


def test_scenario_needs_exactly_one_geometry(lattice, grid_2x2):
    u = VertexFunction({})
    with pytest.raises(MalformedInput):
        Scenario(u=u)
    with pytest.raises(MalformedInput):
        Scenario(u=u, lattice=lattice, planar=grid_2x2)
    with pytest.raises(MalformedInput):
        Scenario.from_dict({"u": {"values": []}})
    with pytest.raises(MalformedInput):
        Scenario.from_dict([1, 2])


def test_lattice_and_complex_loaders(tmp_path, lattice):
    path = write_json(lattice.to_dict(), tmp_path / "lattice.json")
    assert load_lattice(path).cells == lattice.cells
    assert load_complex(path).num_faces == 4

    raw = write_json(lattice.complex.to_dict(), tmp_path / "complex.json")
    assert load_complex(raw).graph.edges == lattice.complex.graph.edges


def test_unreadable_documents(tmp_path):
    with pytest.raises(MalformedInput):
        read_json(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(MalformedInput):
        read_json(broken)


def test_tables_follow_the_suffix(tmp_path):
    rows = [{"face": 0, "charge": 1}, {"face": 3, "charge": -1}]
    csv_path = write_table(rows, tmp_path / "out" / "charges.csv")
    assert pd.read_csv(csv_path)["charge"].tolist() == [1, -1]

    json_path = write_table(pd.DataFrame(rows), tmp_path / "charges.json")
    assert json.loads(json_path.read_text()) == rows
