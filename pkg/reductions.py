"""
Charged graphs and the reductions that normalize them before dipole removal.

Reductions run in a fixed order:

- loops are dropped (their value is kept as is),
- edges joining two boundary vertices are dropped (kept as is),
- interior vertices with divergence of size above one, or charged with
  incident values of both signs, are split into sign-coherent copies,
- boundary vertices with incident values of both signs are split into a
  positive and a negative copy, and zero-valued boundary edges dropped,
- the result is cut into connected components.

The ``ReductionTrace`` records enough to project any form on the reduced
components back to the input graph. Projecting the reduced input form
recovers the input form exactly.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, FrozenSet, Iterable, List, Tuple

from exceptions import HypothesisViolated
from forms import OneForm, boundary_tv, divergence, flux, snap_integral
from graph import Edge, Graph
from logger import get_logger

log = get_logger("reductions")


@dataclass(frozen=True, eq=False)
class ChargedGraph:
    """Graph with boundary vertices and a 1-form of integral interior divergence"""
    graph: Graph
    boundary: FrozenSet[int]
    alpha: OneForm
    tolerance: float = 1e-9

    def __post_init__(self):
        object.__setattr__(self, "boundary", frozenset(self.boundary))
        if self.alpha.graph is not self.graph:
            object.__setattr__(self, "alpha", self.alpha.on_graph(self.graph))

    @cached_property
    def interior(self) -> FrozenSet[int]:
        return frozenset(v for v in self.graph.vertices if v not in self.boundary)

    @cached_property
    def divergence(self) -> Dict[int, float]:
        return divergence(self.alpha)

    @cached_property
    def charges(self) -> Dict[int, int]:
        """Snapped interior divergence; raises IntegralityViolation if not integral"""
        return snap_integral({v: self.divergence[v] for v in self.interior}, self.tolerance)

    @cached_property
    def flux(self) -> float:
        return flux(self.alpha, self.boundary)

    @cached_property
    def tv(self) -> float:
        return boundary_tv(self.alpha, self.boundary)

    @property
    def positive_charges(self) -> List[int]:
        return sorted(v for v, k in self.charges.items() if k > 0)

    @property
    def negative_charges(self) -> List[int]:
        return sorted(v for v, k in self.charges.items() if k < 0)

    def validate(self) -> "ChargedGraph":
        """Raise IntegralityViolation unless the interior divergence is integral"""
        self.charges
        return self

    def has_interior_charge(self) -> bool:
        return any(k != 0 for k in self.charges.values())

    @cached_property
    def boundary_plus(self) -> FrozenSet[int]:
        """Boundary vertices whose incident values are all ≥ 0 with one > 0"""
        return frozenset(v for v in self.boundary if self._boundary_sign(v) > 0)

    @cached_property
    def boundary_minus(self) -> FrozenSet[int]:
        return frozenset(v for v in self.boundary if self._boundary_sign(v) < 0)

    def _boundary_sign(self, v: int) -> int:
        values = [self.alpha(arc) for arc in self.graph.arcs_from(v)]
        if any(x > 0 for x in values) and not any(x < 0 for x in values):
            return 1
        if any(x < 0 for x in values) and not any(x > 0 for x in values):
            return -1
        return 0

    def with_alpha(self, alpha: OneForm) -> "ChargedGraph":
        return ChargedGraph(self.graph, self.boundary, alpha, self.tolerance)

    def negated(self) -> "ChargedGraph":
        return self.with_alpha(-self.alpha)

    def restricted(self, graph: Graph, boundary: Iterable[int]) -> "ChargedGraph":
        """Same form on a subgraph sharing edge ids, with a new boundary"""
        return ChargedGraph(graph, frozenset(boundary), self.alpha.restricted(graph), self.tolerance)

    def to_dict(self) -> Dict:
        return {
            **self.graph.to_dict(),
            "boundary": sorted(self.boundary),
            "form": self.alpha.to_dict(),
        }


@dataclass
class ReductionStep:
    kind: str
    detail: Dict[str, Any] = field(default_factory=dict)


@dataclass(eq=False)
class ReductionTrace:
    """How reduced components map back to the input graph"""
    original: ChargedGraph
    edge_origin: Dict[int, int] = field(default_factory=dict)
    vertex_origin: Dict[int, int] = field(default_factory=dict)
    fixed: Dict[int, float] = field(default_factory=dict)
    steps: List[ReductionStep] = field(default_factory=list)

    def project(self, pieces: Iterable[OneForm]) -> OneForm:
        """
        Form on the input graph from forms on the reduced components.

        Dropped edges take their fixed value; every other input edge takes
        the sum over its copies.
        """
        values = {e: 0.0 for e in self.original.graph.edges}
        values.update(self.fixed)
        for piece in pieces:
            for e, x in piece.values.items():
                values[self.edge_origin[e]] += x
        return OneForm(self.original.graph, values)

    def original_vertex(self, v: int) -> int:
        return self.vertex_origin[v]

    @property
    def is_identity(self) -> bool:
        return all(s.kind == "components" for s in self.steps) and not self.fixed


class _Workspace:
    """Mutable graph under reduction"""

    def __init__(self, cg: ChargedGraph):
        self.vertices: List[int] = list(cg.graph.vertices)
        self.edges: Dict[int, Edge] = dict(cg.graph.edges)
        self.values: Dict[int, float] = dict(cg.alpha.values)
        self.boundary = set(cg.boundary)
        self.next_vertex = cg.graph.next_vertex_id()
        self.next_edge = cg.graph.next_edge_id()

    def incident(self, v: int) -> List[Tuple[int, int]]:
        """(edge id, sign) pairs of arcs leaving v, edge-id order"""
        out = []
        for eid in sorted(self.edges):
            a, b = self.edges[eid]
            if a == v:
                out.append((eid, 1))
            if b == v:
                out.append((eid, -1))
        return out

    def value(self, eid: int, sign: int) -> float:
        return sign * self.values[eid]

    def new_vertex(self) -> int:
        v = self.next_vertex
        self.next_vertex += 1
        self.vertices.append(v)
        return v

    def new_edge(self) -> int:
        e = self.next_edge
        self.next_edge += 1
        return e

    def reattach(self, eid: int, sign: int, new: int) -> None:
        a, b = self.edges[eid]
        self.edges[eid] = (new, b) if sign > 0 else (a, new)

    def drop(self, eid: int) -> float:
        del self.edges[eid]
        return self.values.pop(eid)

    def graph(self) -> Graph:
        return Graph(tuple(self.vertices), self.edges)


def reduce(cg: ChargedGraph, max_tv: float = 2.0) -> Tuple[List[ChargedGraph], ReductionTrace]:
    """
    Normalize a charged graph into connected, reduced components.

    Args:
        cg: Charged graph; interior divergence must be integral.
        max_tv: Largest boundary total variation any caller admits.

    Returns:
        The reduced components (edgeless ones omitted) and the trace that
        projects forms on them back to ``cg``.

    Raises:
        IntegralityViolation: If some interior divergence is not integral.
        HypothesisViolated: If the flux is not in {-1, 0, 1} or the boundary
            total variation exceeds ``max_tv``.
    """
    tol = cg.tolerance
    charges = cg.charges
    if abs(cg.flux - round(cg.flux)) > tol or abs(round(cg.flux)) > 1:
        raise HypothesisViolated(f"Flux {cg.flux:.6g} is outside {{-1, 0, 1}}", "flux")
    if cg.tv > max_tv + tol:
        raise HypothesisViolated(f"Boundary total variation {cg.tv:.6g} exceeds {max_tv}", "tv")

    trace = ReductionTrace(original=cg)
    trace.vertex_origin = {v: v for v in cg.graph.vertices}
    trace.edge_origin = {e: e for e in cg.graph.edges}
    ws = _Workspace(cg)

    loops = [e for e, (a, b) in ws.edges.items() if a == b]
    for e in loops:
        trace.fixed[e] = ws.drop(e)
        del trace.edge_origin[e]
    if loops:
        trace.steps.append(ReductionStep("loops", {"edges": loops}))

    bb = [e for e, (a, b) in ws.edges.items() if a in ws.boundary and b in ws.boundary]
    for e in bb:
        trace.fixed[e] = ws.drop(e)
        del trace.edge_origin[e]
    if bb:
        trace.steps.append(ReductionStep("boundary_edges", {"edges": bb}))

    for v in sorted(charges):
        _split_charge(ws, trace, v, charges[v])

    for v in sorted(ws.boundary):
        _split_boundary(ws, trace, v)

    reduced = ws.graph()
    alpha = OneForm(reduced, ws.values)
    components = []
    for comp in reduced.components:
        sub = reduced.subgraph(comp)
        if sub.num_edges == 0:
            continue
        components.append(
            ChargedGraph(sub, frozenset(comp) & ws.boundary, alpha.restricted(sub), cg.tolerance)
        )
    trace.steps.append(ReductionStep("components", {"count": len(components)}))
    log.debug(
        f"Reduced {cg.graph!r} to {len(components)} component(s) "
        f"({len(trace.steps) - 1} reduction step(s), {len(trace.fixed)} fixed edge(s))"
    )
    return components, trace


def _split_charge(ws: _Workspace, trace: ReductionTrace, v: int, k: int) -> None:
    """Split an interior vertex into one neutral copy and |k| unit copies"""
    if k == 0:
        return
    s = 1 if k > 0 else -1
    K = abs(k)
    incident = ws.incident(v)
    plus = [(e, sg) for e, sg in incident if s * ws.value(e, sg) >= 0]
    minus = [(e, sg) for e, sg in incident if s * ws.value(e, sg) < 0]
    if K == 1 and not minus:
        return

    a_minus = -math.fsum(s * ws.value(e, sg) for e, sg in minus)
    share = a_minus / (K + a_minus)
    originals = {e: ws.values[e] for e, _ in plus}
    for e, _ in plus:
        ws.values[e] = share * originals[e]

    copies = []
    for _ in range(K):
        w = ws.new_vertex()
        trace.vertex_origin[w] = trace.vertex_origin[v]
        copies.append(w)
        for e, sg in incident:
            ne = ws.new_edge()
            a, b = ws.edges[e]
            ws.edges[ne] = (w, b) if sg > 0 else (a, w)
            ws.values[ne] = originals[e] / (K + a_minus) if e in originals else 0.0
            trace.edge_origin[ne] = trace.edge_origin[e]
    trace.steps.append(
        ReductionStep("split_charge", {"vertex": v, "charge": k, "copies": copies, "a_minus": a_minus})
    )


def _split_boundary(ws: _Workspace, trace: ReductionTrace, v: int) -> None:
    """Make a boundary vertex sign-pure; zero-valued edges are dropped"""
    incident = ws.incident(v)
    dropped = []
    negative = []
    for e, sg in incident:
        x = ws.value(e, sg)
        if x == 0.0:
            trace.fixed[trace.edge_origin.pop(e)] = 0.0
            ws.drop(e)
            dropped.append(e)
        elif x < 0:
            negative.append((e, sg))
    has_positive = len(incident) - len(dropped) - len(negative) > 0

    if has_positive and negative:
        w = ws.new_vertex()
        trace.vertex_origin[w] = trace.vertex_origin[v]
        ws.boundary.add(w)
        for e, sg in negative:
            ws.reattach(e, sg, w)
        trace.steps.append(ReductionStep("split_boundary", {"vertex": v, "negative_copy": w}))
    elif not has_positive and not negative:
        ws.vertices.remove(v)
        ws.boundary.discard(v)
        trace.steps.append(ReductionStep("drop_boundary", {"vertex": v, "edges": dropped}))
