import numpy as np
import pytest

from forms import check_hypotheses
from generators import (
    boundary_increments,
    charged_instance,
    grid_complex,
    pipeline_instance,
    random_connected_graph,
    random_profile,
    hypothesis_counterexample,
)
from planar_complex import is_admissible


def test_random_graphs_are_simple_and_connected(rng):
    for _ in range(20):
        graph = random_connected_graph(rng, 7, 11)
        assert graph.is_connected()
        assert graph.num_edges == 11
        assert len({frozenset(pair) for pair in graph.edges.values()}) == 11


@pytest.mark.parametrize("flux", [0, 1, -1])
def test_charged_instances_meet_their_targets(rng, flux):
    for _ in range(20):
        cg = charged_instance(rng, flux=flux, tv_range=(1.0, 1.0) if flux else (0.0, 1.0))
        cg.validate()
        assert cg.flux == pytest.approx(flux, abs=1e-12)
        if flux:
            assert cg.tv == pytest.approx(1.0)
        else:
            assert cg.tv <= 1 + 1e-12


def test_jittered_grids_are_admissible(rng):
    for _ in range(10):
        c = grid_complex(rng, 3, 2, jitter=0.15, diagonal_fraction=0.5)
        assert is_admissible(c)
        assert 6 <= c.num_faces <= 12


def test_boundary_increments(rng):
    steps = boundary_increments(rng, 12, flux=0, tv=0.6)
    assert steps.sum() == pytest.approx(0.0, abs=1e-12)
    assert np.abs(steps).sum() == pytest.approx(0.6)

    steps = boundary_increments(rng, 12, flux=-1)
    assert steps.sum() == pytest.approx(-1.0)
    assert np.all(steps < 0) and np.all(steps > -0.5)


@pytest.mark.parametrize("flux", [0, 1, -1])
def test_pipeline_instances_satisfy_the_hypotheses(rng, flux):
    for _ in range(10):
        c, u = pipeline_instance(rng, flux=flux, max_faces=16)
        report = check_hypotheses(u, c)
        assert report.failing_clause() is None
        assert report.boundary_sum == pytest.approx(flux, abs=1e-9)


def test_random_profile_is_nondecreasing(rng):
    profile = random_profile(rng)
    t = np.linspace(0.0, 0.5, 200)
    assert profile(np.array([0.0]))[0] == 0.0
    assert np.all(np.diff(profile(t)) >= 0)


def test_unknown_counterexample():
    with pytest.raises(ValueError):
        hypothesis_counterexample(4)
