import pytest

from exceptions import HypothesisViolated, IntegralityViolation
from forms import OneForm
from generators import charged_instance, hypothesis_counterexample
from graph import Graph
from reductions import ChargedGraph, reduce


@pytest.mark.parametrize(
    "which, flux, tv",
    [(1, 0.0, 1.2), (2, 1.0, 1.4), (3, 2.0, 2.0)],
)
def test_counterexample_boundary_data(which, flux, tv):
    cg = hypothesis_counterexample(which, 0.1)
    assert cg.flux == pytest.approx(flux)
    assert cg.tv == pytest.approx(tv)


def test_boundary_signs():
    cg = hypothesis_counterexample(2, 0.1)
    assert cg.boundary_plus == frozenset({0, 2})
    assert cg.boundary_minus == frozenset({5})
    assert cg.charges == {1: -1, 3: -1, 4: 1}
    assert cg.positive_charges == [4]
    assert cg.negative_charges == [1, 3]


def test_non_integral_divergence_is_rejected():
    g = Graph.from_pairs(range(3), [(0, 1), (1, 2)])
    cg = ChargedGraph(g, frozenset({0, 2}), OneForm(g, {0: 0.3, 1: 0.4}))
    with pytest.raises(IntegralityViolation):
        cg.validate()


def test_large_boundary_variation_is_rejected():
    g = Graph.from_pairs(range(3), [(0, 1), (1, 2)])
    cg = ChargedGraph(g, frozenset({0, 2}), OneForm(g, {0: 2.0, 1: 2.0}))
    with pytest.raises(HypothesisViolated) as info:
        reduce(cg)
    assert info.value.clause == "tv"


def test_loops_and_boundary_edges_are_fixed():
    g = Graph((0, 1, 2), {0: (0, 0), 1: (0, 2), 2: (0, 1), 3: (1, 2)})
    alpha = OneForm(g, {0: 0.05, 1: 0.2, 2: 0.1, 3: 0.1})
    cg = ChargedGraph(g, frozenset({0, 2}), alpha)
    components, trace = reduce(cg)
    assert trace.fixed == {0: 0.05, 1: 0.2}
    assert [s.kind for s in trace.steps][:2] == ["loops", "boundary_edges"]
    assert trace.project(c.alpha for c in components).max_abs_difference(alpha) <= 1e-12


def test_large_charges_are_split_into_unit_copies():
    # x -> y carries two units along (x, y) and (x, z, y); b hangs off x with value 0
    x, y, z, b = range(4)
    g = Graph.from_pairs(range(4), [(x, y), (x, z), (z, y), (b, x)])
    alpha = OneForm(g, {0: 1.0, 1: 1.0, 2: 1.0, 3: 0.0})
    cg = ChargedGraph(g, frozenset({b}), alpha)
    assert cg.charges == {x: 2, y: -2, z: 0}

    components, trace = reduce(cg)
    kinds = [s.kind for s in trace.steps]
    assert kinds.count("split_charge") == 2
    assert "drop_boundary" in kinds
    for comp in components:
        assert all(abs(k) <= 1 for k in comp.charges.values())
    assert trace.project(c.alpha for c in components).max_abs_difference(alpha) <= 1e-12
    assert {trace.original_vertex(v) for comp in components for v in comp.graph.vertices} <= {x, y, z}


def test_mixed_sign_boundary_vertex_is_split():
    # boundary b pushes 0.5 into x and pulls 0.5 out of y
    b, x, y = range(3)
    g = Graph.from_pairs(range(3), [(b, x), (x, y), (y, b)])
    alpha = OneForm(g, {0: 0.5, 1: 0.5, 2: 0.5})
    cg = ChargedGraph(g, frozenset({b}), alpha)
    components, trace = reduce(cg)
    assert any(s.kind == "split_boundary" for s in trace.steps)
    (comp,) = components
    assert len(comp.boundary) == 2
    assert comp.boundary_plus and comp.boundary_minus
    assert trace.project([comp.alpha]).max_abs_difference(alpha) <= 1e-12


def test_projection_recovers_generated_forms(rng):
    for flux in (0, 1, -1):
        for _ in range(10):
            cg = charged_instance(rng, flux=flux, tv_range=(1.0, 1.0) if flux else (0.0, 1.0))
            components, trace = reduce(cg)
            assert trace.project(c.alpha for c in components).max_abs_difference(cg.alpha) <= 1e-12
            for comp in components:
                assert comp.graph.is_connected()
                for v in comp.boundary:
                    signs = {x > 0 for x in (comp.alpha(a) for a in comp.graph.arcs_from(v)) if x != 0}
                    assert len(signs) <= 1
