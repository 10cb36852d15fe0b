"""
Dipole removal on charged graphs.

Three routines share one solver:

``zero_flux``
    Flux 0 and boundary total variation at most 1. Returns γ with
    |γ| ≤ |α|, γ = α next to the boundary and no interior divergence.
``unit_flux``
    Flux ±1 and total variation exactly 1. Same bound, one interior
    charge left at a vertex x0 with div(γ)(x0) = -Flux(α).
``relaxed``
    Flux ±1 and total variation in (1, 2]. One charge left, |γ| ≤ 3|α|.
"""

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, NoReturn, Optional, Tuple

import numpy as np

from base_solver import BaseSolver
from exceptions import HypothesisViolated, InternalConsistencyError
from flow import Capacity, FlowResult, MaxFlowSolver
from forms import OneForm
from graph import Graph
from reductions import ChargedGraph, reduce
from settings import Settings

ZERO_FLUX = "zero_flux"
UNIT_FLUX = "unit_flux"
RELAXED = "relaxed"

BOUNDS = {ZERO_FLUX: 1.0, UNIT_FLUX: 1.0, RELAXED: 3.0}


@dataclass(eq=False)
class RemovalResult:
    """Corrected form with the data certifying it"""
    gamma: OneForm
    source: ChargedGraph
    method: str
    x0: Optional[int] = None
    witness: Optional[int] = None
    depth: int = 0

    @property
    def bound(self) -> float:
        """Edgewise constant K in |γ| ≤ K|α|"""
        return BOUNDS[self.method]

    def max_ratio(self, tolerance: float = 1e-12) -> float:
        """max |γ(e)| / |α(e)| over edges; edges with α = 0 count only if γ ≠ 0"""
        worst = 0.0
        for e, a in self.source.alpha.values.items():
            g = abs(self.gamma.values[e])
            if abs(a) > tolerance:
                worst = max(worst, g / abs(a))
            elif g > tolerance:
                return math.inf
        return worst

    def certificate(self) -> Dict:
        return {
            "method": self.method,
            "flux": self.source.flux,
            "tv": self.source.tv,
            "max_ratio": self.max_ratio(),
            "bound": self.bound,
            "x0": self.x0,
            "witness": self.witness,
            "depth": self.depth,
        }


class DipoleRemover(BaseSolver):
    """Removes dipoles from charged graphs by max-flow rewiring"""

    def __init__(self, settings: Optional[Settings] = None, seed: Optional[int] = None):
        super().__init__(settings)
        removal = self.settings.removal
        self.x0_selection = removal.x0_selection
        self.witness_tolerance = removal.witness_tolerance
        self.max_depth = removal.max_depth
        self._rng = np.random.default_rng(seed if seed is not None else removal.seed)
        self._flow = MaxFlowSolver(self.settings)

    def solve(self, cg: ChargedGraph) -> RemovalResult:
        """Pick the routine whose hypotheses the input satisfies"""
        tol = self.tolerance
        fx, tv = cg.flux, cg.tv
        if abs(fx) <= tol and tv <= 1 + tol:
            return self.zero_flux(cg)
        if abs(abs(fx) - 1) <= tol and abs(tv - 1) <= tol:
            return self.unit_flux(cg)
        if abs(abs(fx) - 1) <= tol and 1 + tol < tv <= 2 + tol:
            return self.relaxed(cg)
        self._reject(f"No removal applies to flux {fx:.6g} with boundary total variation {tv:.6g}", "h1/h2")

    def zero_flux(self, cg: ChargedGraph) -> RemovalResult:
        """
        Remove every interior charge of a zero-flux form.

        Raises:
            IntegralityViolation: If the interior divergence is not integral.
            HypothesisViolated: If the flux is nonzero or the boundary total
                variation exceeds 1.
            InternalConsistencyError: If the flow value misses its target or
                no strict-decrease edge exists where one is guaranteed.
        """
        tol = self.tolerance
        cg.validate()
        if abs(cg.flux) > tol:
            self._reject(f"Flux is {cg.flux:.6g}, expected 0", "h1")
        if cg.tv > 1 + tol:
            self._reject(f"Boundary total variation {cg.tv:.6g} exceeds 1", "h1")

        components, trace = reduce(cg, max_tv=1.0)
        gamma = trace.project(self._zero_flux_component(comp) for comp in components)
        witness = self._witness(cg.alpha, gamma)
        if witness is None and cg.tv < 1 - tol and cg.has_interior_charge():
            raise InternalConsistencyError("No edge with |γ| < |α| although the boundary variation is below 1")

        result = RemovalResult(gamma=gamma, source=cg, method=ZERO_FLUX, witness=witness)
        self.log_debug(f"Zero-flux removal over {len(components)} component(s)")
        self._report(result)
        return result

    def unit_flux(self, cg: ChargedGraph) -> RemovalResult:
        """
        Reduce all interior charges of a unit-flux form to a single one.

        Raises:
            IntegralityViolation: If the interior divergence is not integral.
            HypothesisViolated: If |flux| ≠ 1 or the boundary total variation ≠ 1.
        """
        tol = self.tolerance
        cg.validate()
        if abs(abs(cg.flux) - 1) > tol:
            self._reject(f"Flux is {cg.flux:.6g}, expected ±1", "h2")
        if abs(cg.tv - 1) > tol:
            self._reject(f"Boundary total variation is {cg.tv:.6g}, expected 1", "h2")

        components, trace = reduce(cg, max_tv=1.0)
        pieces: List[OneForm] = []
        x0, depth = None, 0
        for comp in components:
            if abs(comp.flux) <= tol:
                pieces.append(self._zero_flux_component(comp))
                continue
            gamma, x, depth = self._unit_flux_component(comp)
            pieces.append(gamma)
            x0 = trace.original_vertex(x)
        if x0 is None:
            raise InternalConsistencyError("No component carries the unit flux")

        gamma = trace.project(pieces)
        result = RemovalResult(
            gamma=gamma, source=cg, method=UNIT_FLUX, x0=x0, witness=self._witness(cg.alpha, gamma), depth=depth
        )
        self._report(result)
        return result

    def relaxed(self, cg: ChargedGraph) -> RemovalResult:
        """
        Unit-flux removal when the boundary total variation lies in (1, 2].

        The excess boundary mass is first routed between the positive and
        negative boundary vertices; what remains has variation exactly 1.
        """
        tol = self.tolerance
        cg.validate()
        if abs(abs(cg.flux) - 1) > tol:
            self._reject(f"Flux is {cg.flux:.6g}, expected ±1", "relaxed")
        if not 1 + tol < cg.tv <= 2 + tol:
            self._reject(f"Boundary total variation {cg.tv:.6g} is outside (1, 2]", "relaxed")

        components, trace = reduce(cg, max_tv=2.0)
        pieces: List[OneForm] = []
        x0, depth = None, 0
        for comp in components:
            if abs(comp.flux) <= tol:
                pieces.append(self._zero_flux_component(comp))
            elif abs(comp.tv - 1) <= tol:
                gamma, x, depth = self._unit_flux_component(comp)
                pieces.append(gamma)
                x0 = trace.original_vertex(x)
            else:
                gamma, x, depth = self._relaxed_component(comp)
                pieces.append(gamma)
                x0 = trace.original_vertex(x)
        if x0 is None:
            raise InternalConsistencyError("No component carries the unit flux")

        gamma = trace.project(pieces)
        result = RemovalResult(gamma=gamma, source=cg, method=RELAXED, x0=x0, depth=depth)
        self._report(result)
        return result

    def _max_flow(self, graph: Graph, alpha: OneForm, sources: Iterable[int], sinks: Iterable[int]) -> FlowResult:
        return self._flow.solve(graph, Capacity.from_form(alpha), sources, sinks)

    def _zero_flux_component(self, comp: ChargedGraph) -> OneForm:
        plus, minus = comp.boundary_plus, comp.boundary_minus
        if not plus or not minus:
            if comp.tv > self.tolerance:
                raise InternalConsistencyError(f"Zero-flux component with one-signed boundary (tv {comp.tv:.3g})")
            return OneForm.zeros(comp.graph)

        result = self._max_flow(comp.graph, comp.alpha, plus, minus)
        target = math.fsum(comp.divergence[v] for v in plus)
        if abs(result.value - target) > self.tolerance * max(1.0, target):
            raise InternalConsistencyError(f"Flow value {result.value:.12g} differs from boundary outflow {target:.12g}")
        return result.flow_form

    def _unit_flux_component(self, comp: ChargedGraph) -> Tuple[OneForm, int, int]:
        """Unit-flux removal on one reduced component; returns (γ, x0, depth)"""
        if comp.flux > 0:
            gamma, x0, depth = self._unit_flux_component(comp.negated())
            return -gamma, x0, depth

        tol = self.tolerance
        beta = comp.alpha
        depth = 0
        while True:
            current = comp.with_alpha(beta)
            plus = current.positive_charges
            if not plus:
                raise InternalConsistencyError("Unit-flux component without a positive charge")
            if len(plus) == 1:
                return beta, plus[0], depth

            x0 = self._pick(plus)
            result = self._max_flow(comp.graph, beta, {x0}, current.boundary)
            if abs(result.value - 1) <= tol:
                return result.flow_form, x0, depth

            depth += 1
            if self.max_depth is not None and depth > self.max_depth:
                raise InternalConsistencyError(f"Unit-flux recursion exceeded depth {self.max_depth}")
            sub = self._inner_subproblem(current, result)
            self.log_debug(
                f"Cut value {result.value:.6g} < 1 at x0={x0}; solving {sub.graph!r} "
                f"with {len(plus)} positive charge(s) left"
            )
            beta = beta.patched(self.zero_flux(sub).gamma)

    def _inner_subproblem(self, cg: ChargedGraph, result: FlowResult) -> ChargedGraph:
        """Source side of the cut plus the far cut endpoints, which become its boundary"""
        inner = result.partition.source_side
        rim = result.partition.sink_cut_vertices
        edges = [
            e for e, (a, b) in cg.graph.edges.items() if (a in inner and b in inner) or e in result.min_cut
        ]
        sub = cg.graph.subgraph(inner | rim, edges)
        return cg.restricted(sub, rim)

    def _relaxed_component(self, comp: ChargedGraph) -> Tuple[OneForm, int, int]:
        plus, minus = comp.boundary_plus, comp.boundary_minus
        if comp.flux < 0:
            plus, minus = minus, plus
        result = self._max_flow(comp.graph, comp.alpha, plus, minus)
        target = math.fsum(abs(comp.divergence[v]) for v in minus)
        if abs(result.value - target) > self.tolerance * max(1.0, target):
            raise InternalConsistencyError(f"Flow value {result.value:.12g} differs from inflow {target:.12g}")

        sign = 1.0 if comp.flux > 0 else -1.0
        routed = result.flow_form * sign
        rest = comp.with_alpha(comp.alpha - routed)
        try:
            inner = self.unit_flux(rest)
        except HypothesisViolated as e:
            raise InternalConsistencyError(f"Remainder after routing the excess is not unit-flux: {e}") from e
        return routed + inner.gamma, inner.x0, inner.depth

    def _reject(self, message: str, clause: str) -> NoReturn:
        self.log_warning(f"Hypothesis {clause} fails: {message}")
        raise HypothesisViolated(message, clause)

    def _report(self, result: RemovalResult) -> None:
        self.log_info(
            f"{result.method}: flux {result.source.flux:.6g}, tv {result.source.tv:.6g}, "
            f"|γ| total {math.fsum(result.gamma.magnitudes().values()):.6g}, ratio {result.max_ratio():.6g}, "
            f"x0 {result.x0}, witness {result.witness}"
        )

    def _pick(self, candidates: List[int]) -> int:
        if self.x0_selection == "random":
            return int(candidates[self._rng.integers(len(candidates))])
        return candidates[0]

    def _witness(self, alpha: OneForm, gamma: OneForm) -> Optional[int]:
        """Edge maximizing |α| - |γ| if that gap exceeds the witness tolerance"""
        best, gap = None, self.witness_tolerance
        for e in sorted(alpha.values):
            d = abs(alpha.values[e]) - abs(gamma.values[e])
            if d > gap:
                best, gap = e, d
        return best


def remove_dipoles_zero_flux(cg: ChargedGraph, settings: Optional[Settings] = None) -> RemovalResult:
    return DipoleRemover(settings).zero_flux(cg)


def remove_dipoles_unit_flux(
    cg: ChargedGraph, settings: Optional[Settings] = None, seed: Optional[int] = None
) -> RemovalResult:
    return DipoleRemover(settings, seed=seed).unit_flux(cg)


def remove_dipoles_relaxed(cg: ChargedGraph, settings: Optional[Settings] = None) -> RemovalResult:
    return DipoleRemover(settings).relaxed(cg)


def remove_dipoles(cg: ChargedGraph, settings: Optional[Settings] = None) -> RemovalResult:
    """Apply whichever removal routine the flux and boundary variation admit"""
    return DipoleRemover(settings).solve(cg)
