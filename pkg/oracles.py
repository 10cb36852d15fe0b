"""
Brute-force oracles and the self-verification suite.

The oracles are exhaustive and use exact rational arithmetic where they can,
so they share no code path with the engines they check.
"""

import math
import time
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple, Union

import networkx as nx
import numpy as np
import pandas as pd

import generators
from base_solver import BaseSolver
from dual import dualize, push_form
from exceptions import DipoleError, HypothesisViolated, Infeasible, MalformedInput, TooLarge
from flow import Capacity, MaxFlowSolver
from forms import OneForm, VertexFunction, curl, divergence, project_pi, project_pi_array
from graph import Graph
from lattice import (
    EnergyProfile,
    LatticeDomain,
    Polygon,
    Relaxer,
    discretize,
    energy,
    lattice_hypotheses,
    star_boundary,
    vorticity,
)
from pipeline import DipolePipeline
from reductions import ChargedGraph
from removal import DipoleRemover
from settings import Settings

MAX_BRUTE_EDGES = 14


def brute_min_cut(graph: Graph, capacity: Capacity, V1: Iterable[int], V2: Iterable[int]) -> float:
    """
    Minimal c(C) over every edge set C whose removal separates V1 from V2.

    Raises:
        TooLarge: If the graph has more than 14 non-loop edges.
        MalformedInput: If the terminal sets overlap.
    """
    V1, V2 = frozenset(V1), frozenset(V2)
    if V1 & V2:
        raise MalformedInput(f"Terminal sets overlap at {sorted(V1 & V2)}")
    edges = [(e, a, b) for e, (a, b) in sorted(graph.edges.items()) if a != b]
    if len(edges) > MAX_BRUTE_EDGES:
        raise TooLarge(f"{len(edges)} edges exceed the exhaustive limit of {MAX_BRUTE_EDGES}")

    weights = [Fraction(capacity[e]) for e, _, _ in edges]
    best: Optional[Fraction] = None
    for mask in range(1 << len(edges)):
        cost = sum((w for k, w in enumerate(weights) if mask >> k & 1), Fraction(0))
        if best is not None and cost >= best:
            continue
        kept = [(a, b) for k, (_, a, b) in enumerate(edges) if not mask >> k & 1]
        if not _reaches(graph.vertices, kept, V1, V2):
            best = cost
    return float(best)


def _reaches(vertices: Iterable[int], pairs: List[Tuple[int, int]], V1: FrozenSet[int], V2: FrozenSet[int]) -> bool:
    adj: Dict[int, List[int]] = {v: [] for v in vertices}
    for a, b in pairs:
        adj[a].append(b)
        adj[b].append(a)
    seen = set(V1)
    queue = deque(V1)
    while queue:
        v = queue.popleft()
        if v in V2:
            return True
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return False


@dataclass
class Indeterminate:
    """Constraints leave some edges free"""
    free_edges: List[int]
    vertices: List[int]


def forced_form(
    graph: Graph,
    boundary: Iterable[int],
    alpha: OneForm,
    boundary_values: Optional[Mapping[int, float]] = None,
) -> Union[OneForm, Indeterminate]:
    """
    The only competitor γ on a tree, if there is one.

    Competitors agree with ``boundary_values`` (default: α) on the edges
    touching the boundary, satisfy |γ| ≤ |α| edgewise and have integral
    divergence at every interior vertex. Leaves are peeled inward: an interior
    vertex with a single undetermined edge pins that edge to the values
    k - s (k integral, s the known outflow) that fit under |α|.

    Raises:
        MalformedInput: If the graph is not a tree.
        Infeasible: If no competitor exists.
    """
    if not nx.is_tree(graph.to_networkx()):
        raise MalformedInput("Forced-form oracle needs a tree")
    boundary = frozenset(boundary)

    def exact(x: float) -> Fraction:
        return Fraction(x).limit_denominator(10**6)

    bound = {e: abs(exact(x)) for e, x in alpha.values.items()}
    known: Dict[int, Fraction] = {}
    for e, (a, b) in graph.edges.items():
        if a in boundary or b in boundary:
            x = boundary_values[e] if boundary_values is not None and e in boundary_values else alpha.values[e]
            known[e] = exact(x)

    interior = [v for v in graph.vertices if v not in boundary]
    changed = True
    while changed:
        changed = False
        for v in interior:
            arcs = graph.arcs_from(v)
            open_arcs = [arc for arc in arcs if arc.edge not in known]
            if len(open_arcs) != 1:
                continue
            arc = open_arcs[0]
            s = sum((arc2.sign * known[arc2.edge] for arc2 in arcs if arc2.edge in known), Fraction(0))
            limit = bound[arc.edge]
            candidates = [
                Fraction(k) - s for k in range(math.floor(-limit + s), math.ceil(limit + s) + 1)
                if abs(Fraction(k) - s) <= limit
            ]
            if not candidates:
                raise Infeasible(f"No integral divergence fits at vertex {v}")
            if len(candidates) == 1:
                known[arc.edge] = arc.sign * candidates[0]
                changed = True

    for v in interior:
        arcs = graph.arcs_from(v)
        if all(arc.edge in known for arc in arcs):
            total = sum((arc.sign * known[arc.edge] for arc in arcs), Fraction(0))
            if total.denominator != 1:
                raise Infeasible(f"Divergence {total} at vertex {v} is not integral")

    free = sorted(e for e in graph.edges if e not in known)
    if free:
        touched = sorted({v for e in free for v in graph.edges[e]})
        return Indeterminate(free_edges=free, vertices=touched)
    return OneForm(graph, {e: float(x) for e, x in known.items()})


@dataclass
class CheckOutcome:
    check: str
    instances: int = 0
    failures: int = 0
    max_error: float = 0.0
    seconds: float = 0.0
    messages: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.instances > 0 and self.failures == 0

    def record(self, ok: bool, error: float = 0.0, message: str = "") -> None:
        self.instances += 1
        self.max_error = max(self.max_error, error)
        if not ok:
            self.failures += 1
            if message and len(self.messages) < 5:
                self.messages.append(message)

    def to_dict(self) -> Dict:
        return {
            "check": self.check,
            "instances": self.instances,
            "passed": self.passed,
            "failures": self.failures,
            "max_error": self.max_error,
            "seconds": round(self.seconds, 3),
        }


class VerificationSuite(BaseSolver):
    """Runs the engines against the oracles and the documented examples"""

    def __init__(self, settings: Optional[Settings] = None, quick: bool = False, seed: Optional[int] = None):
        super().__init__(settings)
        self.config = self.settings.verify
        self.quick = quick
        self.seed = self.config.seed if seed is None else seed

    def count(self, n: int) -> int:
        return max(5, n // 10) if self.quick else n

    def checks(self) -> List[Tuple[str, Callable[[CheckOutcome, np.random.Generator], None]]]:
        return [
            ("projection", self.check_projection),
            ("duality", self.check_duality),
            ("max_flow_min_cut", self.check_mfmc),
            ("zero_flux_removal", self.check_zero_flux),
            ("unit_flux_removal", self.check_unit_flux),
            ("sharpness", self.check_sharpness),
            ("relaxed_constant", self.check_relaxed),
            ("pipeline_round_trip", self.check_round_trip),
            ("one_vortex", self.check_one_vortex),
            ("dipole_demo", self.check_dipole_demo),
        ]

    def solve(self) -> pd.DataFrame:
        rows = []
        for k, (name, check) in enumerate(self.checks()):
            outcome = CheckOutcome(name)
            rng = np.random.default_rng([self.seed, k])
            start = time.perf_counter()
            try:
                check(outcome, rng)
            except DipoleError as e:
                self.log_error(f"{name} aborted", e)
                outcome.record(False, message=f"{type(e).__name__}: {e}")
            outcome.seconds = time.perf_counter() - start
            for message in outcome.messages:
                self.log_warning(f"{name}: {message}")
            self.log_info(f"{name}: {outcome.instances - outcome.failures}/{outcome.instances} passed")
            rows.append(outcome.to_dict())
        return pd.DataFrame(rows, columns=["check", "instances", "passed", "failures", "max_error", "seconds"])

    def check_projection(self, out: CheckOutcome, rng: np.random.Generator) -> None:
        y = rng.uniform(-1e3, 1e3, size=self.count(self.config.project_pi_samples))
        projected = project_pi_array(y)
        distance = np.abs(y - np.round(y))
        error = float(np.max(np.abs(np.abs(projected) - distance)))
        in_range = bool(np.all(np.abs(projected) <= 0.5))
        scalar = all(project_pi(float(x)) == float(p) for x, p in zip(y[:1000], projected[:1000]))
        out.record(error == 0.0 and in_range and scalar, error, f"|π(y)| differs from dist(y, Z) by {error}")
        for k in range(6):
            for sign in (1, -1):
                y0 = sign * (k + 0.5)
                out.record(project_pi(y0) == sign * 0.5, message=f"π({y0}) = {project_pi(y0)}")

    def check_duality(self, out: CheckOutcome, rng: np.random.Generator) -> None:
        for _ in range(self.count(self.config.duality_instances)):
            c = generators.random_admissible_complex(rng)
            alpha = generators.random_form(rng, c.graph)
            dual = dualize(c)
            div = divergence(push_form(alpha, dual))
            face_curl = curl(alpha, c)
            error = max(abs(face_curl[f] - div[f]) for f in range(c.num_faces))
            out.record(error <= 1e-12, error, f"curl/div mismatch {error:.3g} on {c!r}")

    def check_mfmc(self, out: CheckOutcome, rng: np.random.Generator) -> None:
        solver = MaxFlowSolver(self.settings)
        for _ in range(self.count(self.config.mfmc_instances)):
            n = int(rng.integers(3, 9))
            graph = generators.random_connected_graph(rng, n, int(rng.integers(n - 1, min(14, n * (n - 1) // 2) + 1)))
            capacity = generators.random_capacity(rng, graph)
            V1, V2 = generators.random_terminals(rng, graph)
            result = solver.solve(graph, capacity, V1, V2)
            oracle = brute_min_cut(graph, capacity, V1, V2)
            saturation = max(
                (capacity[e] - abs(result.flow_form.values[e]) for e in result.min_cut), default=0.0
            )
            error = max(
                abs(result.value - oracle),
                abs(result.cut_capacity - result.value),
                abs(result.paths.total - result.cut_capacity),
                saturation,
            )
            out.record(error <= 1e-9, error, f"flow {result.value:.12g} vs oracle {oracle:.12g}")

    def _removal_error(self, cg: ChargedGraph, gamma: OneForm) -> float:
        """Largest violation of |γ| ≤ |α| and of γ = α next to the boundary"""
        worst = 0.0
        for e, (a, b) in cg.graph.edges.items():
            x, g = cg.alpha.values[e], gamma.values[e]
            worst = max(worst, abs(g) - abs(x))
            if a in cg.boundary or b in cg.boundary:
                worst = max(worst, abs(g - x))
        return worst

    def check_zero_flux(self, out: CheckOutcome, rng: np.random.Generator) -> None:
        remover = DipoleRemover(self.settings)
        for _ in range(self.count(self.config.removal_instances)):
            cg = generators.charged_instance(rng, flux=0)
            result = remover.zero_flux(cg)
            div = divergence(result.gamma)
            error = max(self._removal_error(cg, result.gamma), max(abs(div[v]) for v in cg.interior))
            strict_ok = True
            if cg.tv < 1 - self.tolerance and cg.has_interior_charge():
                strict_ok = result.witness is not None
            out.record(error <= 1e-9 and strict_ok, error, f"zero-flux error {error:.3g}, witness {result.witness}")

    def check_unit_flux(self, out: CheckOutcome, rng: np.random.Generator) -> None:
        remover = DipoleRemover(self.settings)
        for _ in range(self.count(self.config.removal_instances)):
            cg = generators.charged_instance(rng, flux=int(rng.choice([-1, 1])), tv_range=(1.0, 1.0))
            result = remover.unit_flux(cg)
            div = divergence(result.gamma)
            others = max((abs(div[v]) for v in cg.interior if v != result.x0), default=0.0)
            error = max(self._removal_error(cg, result.gamma), others, abs(div[result.x0] + cg.flux))
            depth_ok = result.depth <= max(len(cg.positive_charges), len(cg.negative_charges))
            out.record(error <= 1e-9 and depth_ok, error, f"unit-flux error {error:.3g}, depth {result.depth}")

    def check_sharpness(self, out: CheckOutcome, rng: np.random.Generator) -> None:
        remover = DipoleRemover(self.settings)
        for eps in (0.05, 0.1):
            expected = {1: (0.0, 1 + 2 * eps), 2: (1.0, 1 + 4 * eps), 3: (2.0, 2.0)}
            routines = {1: remover.zero_flux, 2: remover.unit_flux, 3: remover.solve}
            for which, (fx, tv) in expected.items():
                cg = generators.hypothesis_counterexample(which, eps)
                error = max(abs(cg.flux - fx), abs(cg.tv - tv))
                try:
                    routines[which](cg)
                    rejected = False
                except HypothesisViolated:
                    rejected = True
                forced = forced_form(cg.graph, cg.boundary, cg.alpha)
                unique = isinstance(forced, OneForm) and forced.max_abs_difference(cg.alpha) <= 1e-9
                out.record(
                    error <= 1e-12 and rejected and unique,
                    error,
                    f"example {which} at ε={eps}: rejected={rejected}, forced={unique}",
                )

    def check_relaxed(self, out: CheckOutcome, rng: np.random.Generator) -> None:
        remover = DipoleRemover(self.settings)
        for eps, ratio in ((0.25, 3.0), (0.1, 1.5)):
            result = remover.relaxed(generators.hypothesis_counterexample(2, eps))
            error = abs(result.max_ratio() - ratio)
            out.record(error <= 1e-9, error, f"ratio {result.max_ratio():.12g} at ε={eps}, expected {ratio}")

    def check_round_trip(self, out: CheckOutcome, rng: np.random.Generator) -> None:
        pipeline = DipolePipeline(self.settings)
        tol = self.settings.tolerances.round_trip
        for k in range(self.count(self.config.pipeline_instances)):
            c, u = generators.pipeline_instance(rng, flux=(0, 1, -1)[k % 3])
            u_tilde, report = pipeline.solve(c, u)
            boundary = {a.tail for a in c.boundary().edges}
            exact = all(u_tilde[v] == u[v] for v in boundary)
            ok = exact and report.round_trip_error <= tol and report.max_ratio <= 1 + 1e-12
            out.record(ok and report.energy_decreased(), report.round_trip_error, f"round trip on {c!r}: {report.to_dict()}")

    def check_one_vortex(self, out: CheckOutcome, rng: np.random.Generator) -> None:
        pipeline = DipolePipeline(self.settings)
        relaxer = Relaxer(self.settings)
        sd = EnergyProfile.sd()
        epsilons = (0.25, 0.125) if self.quick else (0.25, 0.125, 0.0625)
        for eps in epsilons:
            lattice = discretize(Polygon.square(1), eps)
            u0 = star_boundary(lambda t: t, lattice, rays=self.settings.lattice.star_rays)
            hypotheses = lattice_hypotheses(u0, lattice)
            filled = VertexFunction({v: u0.values.get(v, 0.0) for v in range(lattice.num_vertices)})
            u = relaxer.solve(filled, lattice, sd, sweeps=5 if self.quick else None)
            u_tilde, report = pipeline.solve(lattice.complex, u)
            measure = vorticity(u_tilde, lattice)
            error = abs(hypotheses.boundary_sum - 1.0)
            ok = (
                error <= 1e-12
                and measure.total == 1
                and len(measure.support()) == 1
                and report.energy_decreased()
            )
            out.record(ok, error, f"ε={eps}: charges {measure.charges}, energies {report.energies}")

    def check_dipole_demo(self, out: CheckOutcome, rng: np.random.Generator) -> None:
        lattice, minimal, charged = dipole_demo_states()
        pipeline = DipolePipeline(self.settings)
        before = vorticity(charged, lattice)
        u_tilde, report = pipeline.solve(lattice.complex, charged)
        after = vorticity(u_tilde, lattice)
        sd = EnergyProfile.sd()
        tie = abs(energy(minimal, lattice, sd) - energy(charged, lattice, sd))
        ok = len(before.support()) == 2 and not after.support() and report.energy_decreased() and tie <= 1e-9
        out.record(ok, tie, f"charges {before.charges} → {after.charges}, energies {report.energies}")


def dipole_demo_states() -> Tuple[LatticeDomain, VertexFunction, VertexFunction]:
    """
    2 × 2 cells with zero boundary data except 1/2 at the top middle.

    Returns the lattice, the vortex-free state (centre at 1/8) and the state
    carrying a -1/+1 pair in the top cells (centre at -1/8). Both have
    screw-dislocation energy 11/16.
    """
    lattice = LatticeDomain.from_cells(1, [(0, 0), (1, 0), (0, 1), (1, 1)])
    base = {v: 0.0 for v in range(lattice.num_vertices)}
    base[lattice.vertex_at(1, 2)] = 0.5
    centre = lattice.vertex_at(1, 1)
    minimal = VertexFunction({**base, centre: 0.125})
    charged = VertexFunction({**base, centre: -0.125})
    return lattice, minimal, charged


def run_verification(settings: Optional[Settings] = None, quick: bool = False, seed: Optional[int] = None) -> pd.DataFrame:
    return VerificationSuite(settings, quick=quick, seed=seed).solve()
