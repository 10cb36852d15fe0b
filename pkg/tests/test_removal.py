import math

import pytest

from exceptions import HypothesisViolated, IntegralityViolation
from forms import OneForm, divergence
from generators import charged_instance, hypothesis_counterexample
from graph import Graph
from reductions import ChargedGraph
from removal import (
    RELAXED,
    UNIT_FLUX,
    ZERO_FLUX,
    DipoleRemover,
    RemovalResult,
    remove_dipoles,
    remove_dipoles_relaxed,
    remove_dipoles_unit_flux,
    remove_dipoles_zero_flux,
)


def boundary_edges(cg):
    return [e for e, (a, b) in cg.graph.edges.items() if a in cg.boundary or b in cg.boundary]


def test_counterexamples_fail_the_matching_hypothesis():
    with pytest.raises(HypothesisViolated) as info:
        remove_dipoles_zero_flux(hypothesis_counterexample(1, 0.1))
    assert info.value.clause == "h1"

    with pytest.raises(HypothesisViolated) as info:
        remove_dipoles_unit_flux(hypothesis_counterexample(2, 0.1))
    assert info.value.clause == "h2"

    with pytest.raises(HypothesisViolated) as info:
        remove_dipoles(hypothesis_counterexample(3))
    assert info.value.clause == "h1/h2"


def test_relaxed_bound_is_attained():
    result = remove_dipoles_relaxed(hypothesis_counterexample(2, 0.25))
    assert result.method == RELAXED
    assert result.x0 == 1
    assert result.max_ratio() == pytest.approx(3.0)
    assert result.certificate()["bound"] == 3.0


def test_relaxed_ratio_for_small_epsilon():
    result = remove_dipoles_relaxed(hypothesis_counterexample(2, 0.1))
    assert result.x0 in {1, 3}
    assert result.max_ratio() == pytest.approx(1.5)
    div = divergence(result.gamma)
    assert div[result.x0] == pytest.approx(-1.0)
    for v in result.source.interior - {result.x0}:
        assert div[v] == pytest.approx(0.0, abs=1e-9)


def test_isolated_dipole_is_removed():
    b0, x, y, b1 = range(4)
    g = Graph.from_pairs(range(4), [(b0, x), (x, y), (y, b1)])
    cg = ChargedGraph(g, frozenset({b0, b1}), OneForm(g, {0: 0.0, 1: 1.0, 2: 0.0}))
    result = remove_dipoles_zero_flux(cg)
    assert result.gamma.values == {0: 0.0, 1: 0.0, 2: 0.0}
    assert result.witness == 1
    assert result.max_ratio() == 0.0


def test_zero_flux_chain_has_exact_values():
    s, a, b, t = range(4)
    g = Graph.from_pairs(range(4), [(s, a), (a, b), (b, t)])
    cg = ChargedGraph(g, frozenset({s, t}), OneForm(g, {0: 0.2, 1: -0.8, 2: 0.2}))
    assert cg.charges == {a: -1, b: 1}

    result = remove_dipoles_zero_flux(cg)
    assert result.gamma.values == pytest.approx({0: 0.2, 1: 0.2, 2: 0.2})
    assert result.witness == g.find_arc(a, b).edge
    assert result.max_ratio() == pytest.approx(1.0)


def test_unit_flux_chain_keeps_its_form():
    s, a, t = range(3)
    g = Graph.from_pairs(range(3), [(s, a), (a, t)])
    cg = ChargedGraph(g, frozenset({s, t}), OneForm(g, {0: 0.6, 1: -0.4}))
    assert cg.flux == pytest.approx(1.0)
    assert cg.tv == pytest.approx(1.0)

    result = remove_dipoles_unit_flux(cg)
    assert result.x0 == a
    assert result.gamma.values == pytest.approx({0: 0.6, 1: -0.4})
    assert result.witness is None
    assert divergence(result.gamma)[a] == pytest.approx(-1.0)


def test_each_removal_is_logged(mocker):
    s, a, t = range(3)
    g = Graph.from_pairs(range(3), [(s, a), (a, t)])
    remover = DipoleRemover()
    info = mocker.spy(remover, "log_info")
    warning = mocker.spy(remover, "log_warning")

    remover.unit_flux(ChargedGraph(g, frozenset({s, t}), OneForm(g, {0: 0.6, 1: -0.4})))
    assert info.call_count == 1
    message = info.call_args.args[0]
    assert message.startswith(UNIT_FLUX)
    assert "flux 1" in message and "x0 1" in message
    warning.assert_not_called()

    with pytest.raises(HypothesisViolated):
        remover.zero_flux(ChargedGraph(g, frozenset({s, t}), OneForm(g, {0: 0.6, 1: -0.4})))
    warning.assert_called_once()
    assert "h1" in warning.call_args.args[0]


def test_zero_flux_removal_on_generated_instances(rng):
    remover = DipoleRemover()
    for _ in range(40):
        cg = charged_instance(rng, flux=0)
        result = remover.zero_flux(cg)
        assert result.method == ZERO_FLUX
        assert result.max_ratio() <= 1 + 1e-9
        div = divergence(result.gamma)
        for v in cg.interior:
            assert div[v] == pytest.approx(0.0, abs=1e-9)
        for e in boundary_edges(cg):
            assert result.gamma.values[e] == pytest.approx(cg.alpha.values[e], abs=1e-9)
        if cg.tv < 1 - 1e-9 and cg.has_interior_charge():
            assert result.witness is not None


@pytest.mark.parametrize("flux", [1, -1])
def test_unit_flux_removal_on_generated_instances(rng, flux):
    remover = DipoleRemover()
    for _ in range(40):
        cg = charged_instance(rng, flux=flux, tv_range=(1.0, 1.0))
        result = remover.unit_flux(cg)
        assert result.method == UNIT_FLUX
        assert result.x0 in cg.interior
        assert result.max_ratio() <= 1 + 1e-9
        div = divergence(result.gamma)
        assert div[result.x0] == pytest.approx(-flux, abs=1e-9)
        for v in cg.interior - {result.x0}:
            assert div[v] == pytest.approx(0.0, abs=1e-9)


def test_dispatcher_picks_the_routine(rng):
    assert remove_dipoles(charged_instance(rng, flux=0)).method == ZERO_FLUX
    assert remove_dipoles(charged_instance(rng, flux=1, tv_range=(1.0, 1.0))).method == UNIT_FLUX
    assert remove_dipoles(hypothesis_counterexample(2, 0.1)).method == RELAXED
    with pytest.raises(HypothesisViolated):
        remove_dipoles(hypothesis_counterexample(1, 0.1))


def test_fractional_charge_is_rejected():
    g = Graph.from_pairs(range(3), [(0, 1), (1, 2)])
    cg = ChargedGraph(g, frozenset({0, 2}), OneForm(g, {0: 0.3, 1: 0.4}))
    with pytest.raises(IntegralityViolation):
        remove_dipoles_zero_flux(cg)


def test_ratio_is_infinite_where_alpha_vanishes():
    g = Graph.from_pairs(range(3), [(0, 1), (1, 2)])
    source = ChargedGraph(g, frozenset({0, 2}), OneForm.zeros(g))
    result = RemovalResult(gamma=OneForm(g, {0: 0.5, 1: 0.0}), source=source, method=ZERO_FLUX)
    assert math.isinf(result.max_ratio())
    assert result.certificate()["bound"] == 1.0


def test_random_x0_is_reproducible(rng, random_x0_settings):
    cg = charged_instance(rng, flux=1, tv_range=(1.0, 1.0), dipoles=3)
    first = DipoleRemover(random_x0_settings).unit_flux(cg)
    second = DipoleRemover(random_x0_settings).unit_flux(cg)
    assert first.x0 == second.x0
    assert first.gamma.values == second.gamma.values
    assert remove_dipoles_unit_flux(cg, random_x0_settings, seed=3).x0 in cg.interior
