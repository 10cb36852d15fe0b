"""
Dominated flows on bidirectional graphs and the max-flow min-cut engine.

Capacities are symmetric. The engine runs networkx's shortest augmenting path
algorithm on the doubled graph (each edge gives one arc per direction, both
with capacity c), so it terminates for arbitrary real capacities. The min cut
is read from the vertices still reachable in the residual network. The returned
flow form is the net flow with circulations stripped, which uses each edge
in one direction only and therefore respects |γ| ≤ c.
"""

import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Tuple

import networkx as nx
import numpy as np

from base_solver import BaseSolver
from exceptions import DisconnectedGraph, EmptyTerminalSet, MalformedInput, NotAFlow
from forms import OneForm, divergence
from graph import Arc, Graph
from settings import Settings

FLOW_DIVERGENCE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Capacity:
    """Nonnegative capacity per edge id, the same in both directions"""
    values: Mapping[int, float]

    def __post_init__(self):
        vals = {int(e): float(x) for e, x in self.values.items()}
        negative = [e for e, x in vals.items() if x < 0 or math.isnan(x)]
        if negative:
            raise MalformedInput(f"Capacities must be nonnegative (edges {negative[:5]})")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_form(cls, alpha: OneForm) -> "Capacity":
        """c = |α|"""
        return cls(alpha.magnitudes())

    def __getitem__(self, edge: int) -> float:
        return self.values[edge]

    def total(self) -> float:
        return math.fsum(self.values.values())

    def of_cut(self, edges: Iterable[int]) -> float:
        """c(C) for a bidirectional cut given by its edge ids"""
        return math.fsum(self.values[e] for e in edges)


@dataclass(frozen=True)
class FlowPath:
    """Simple path with a positive multiplicity"""
    arcs: Tuple[Arc, ...]
    multiplicity: float

    @property
    def vertices(self) -> Tuple[int, ...]:
        if not self.arcs:
            return ()
        return (self.arcs[0].tail,) + tuple(arc.head for arc in self.arcs)

    @property
    def source(self) -> int:
        return self.arcs[0].tail

    @property
    def sink(self) -> int:
        return self.arcs[-1].head


@dataclass(frozen=True)
class PathFlow:
    """Finite family of simple paths with multiplicities"""
    paths: Tuple[FlowPath, ...] = ()

    @property
    def total(self) -> float:
        """T(Φ) = Σ m_i"""
        return math.fsum(p.multiplicity for p in self.paths)

    def traffic(self) -> Dict[int, float]:
        """Multiplicity crossing each edge, both directions counted"""
        out: Dict[int, float] = {}
        for p in self.paths:
            for arc in p.arcs:
                out[arc.edge] = out.get(arc.edge, 0.0) + p.multiplicity
        return out

    def is_dominated(self, capacity: Capacity, tolerance: float = FLOW_DIVERGENCE_TOLERANCE) -> bool:
        return all(t <= capacity[e] + tolerance for e, t in self.traffic().items())

    def flow_form(self, graph: Graph) -> OneForm:
        """γ_Φ(e) = Σ over paths through e of ±m_i"""
        vals = {e: 0.0 for e in graph.edges}
        for p in self.paths:
            for arc in p.arcs:
                vals[arc.edge] += arc.sign * p.multiplicity
        return OneForm(graph, vals)

    def to_dict(self) -> Dict:
        return {"paths": [{"vertices": list(p.vertices), "multiplicity": p.multiplicity} for p in self.paths]}


@dataclass(frozen=True)
class CutPartition:
    """Side partition induced by a minimal cut"""
    source_side: FrozenSet[int]
    sink_side: FrozenSet[int]
    source_cut_vertices: FrozenSet[int]
    sink_cut_vertices: FrozenSet[int]


@dataclass(frozen=True, eq=False)
class FlowResult:
    """Optimal dominated flow together with a minimal cut"""
    flow_form: OneForm
    value: float
    capacity: Capacity
    min_cut: FrozenSet[int]
    partition: CutPartition
    oriented_cut: Tuple[Arc, ...]
    paths: PathFlow
    circulation: OneForm

    @property
    def cut_capacity(self) -> float:
        return self.capacity.of_cut(self.min_cut)

    @cached_property
    def divergence(self) -> Dict[int, float]:
        return divergence(self.flow_form)

    def to_dict(self) -> Dict:
        return {
            "value": self.value,
            "cut_capacity": self.cut_capacity,
            "min_cut": sorted(self.min_cut),
            "oriented_cut": [[arc.tail, arc.head] for arc in self.oriented_cut],
            "source_side": sorted(self.partition.source_side),
            "sink_side": sorted(self.partition.sink_side),
            "flow_form": self.flow_form.to_dict(),
            **self.paths.to_dict(),
        }


class MaxFlowSolver(BaseSolver):
    """Shortest-augmenting-path max flow between vertex sets"""

    SOURCE = "_source"
    SINK = "_sink"

    def __init__(self, settings: Optional[Settings] = None, arc_order_seed: Optional[int] = None):
        super().__init__(settings)
        flow_settings = self.settings.flow
        self.residual_tolerance = flow_settings.residual_tolerance
        self.arc_order_seed = arc_order_seed if arc_order_seed is not None else flow_settings.arc_order_seed

    def solve(self, graph: Graph, capacity: Capacity, sources: Iterable[int], sinks: Iterable[int]) -> FlowResult:
        """
        Compute a maximal dominated flow from ``sources`` to ``sinks``.

        Args:
            graph: Connected bidirectional graph.
            capacity: Symmetric capacity on the graph's edges.
            sources: Nonempty vertex set V1.
            sinks: Nonempty vertex set V2, disjoint from V1.

        Returns:
            FlowResult with the cycle-free flow form, its value, the
            source-side-minimal cut and the induced partition.

        Raises:
            EmptyTerminalSet: If V1 or V2 is empty.
            DisconnectedGraph: If the graph is not connected.
        """
        V1, V2 = frozenset(sources), frozenset(sinks)
        if not V1 or not V2:
            raise EmptyTerminalSet(f"Terminal sets must be nonempty (|V1|={len(V1)}, |V2|={len(V2)})")
        if V1 & V2:
            raise MalformedInput(f"Terminal sets overlap at {sorted(V1 & V2)[:5]}")
        if not graph.is_connected():
            raise DisconnectedGraph(f"Flow graph has {len(graph.components)} components")
        missing = set(graph.edges) - set(capacity.values)
        if missing:
            raise MalformedInput(f"Capacity missing for edges {sorted(missing)[:5]}")

        network, bundles = self._network(graph, capacity, V1, V2)
        residual = nx.algorithms.flow.shortest_augmenting_path(network, self.SOURCE, self.SINK, capacity="capacity")
        value = residual.graph["flow_value"]

        # parallel edges share their pair's net flow in proportion to capacity
        raw = {eid: 0.0 for eid in graph.edges}
        for (a, b), eids in bundles.items():
            net = residual[a][b]["flow"]
            total = math.fsum(capacity[e] for e in eids)
            for e in eids:
                share = net * capacity[e] / total if total > 0 else 0.0
                raw[e] = share if graph.edges[e] == (a, b) else -share
        raw_form = OneForm(graph, raw)

        open_arcs = nx.subgraph_view(
            residual,
            filter_edge=lambda u, v: residual[u][v]["capacity"] - residual[u][v]["flow"] > self.residual_tolerance,
        )
        reach = frozenset(v for v in nx.descendants(open_arcs, self.SOURCE) if v != self.SINK)
        min_cut = frozenset(eid for eid, (a, b) in graph.edges.items() if (a in reach) != (b in reach))
        oriented_cut = tuple(
            graph.arc(eid, 1) if graph.edges[eid][0] in reach else graph.arc(eid, -1) for eid in sorted(min_cut)
        )
        partition = cut_partition(graph, min_cut, V1, V2)

        paths, circulation = _decompose(raw_form, V1, V2, self.residual_tolerance)
        flow_form = paths.flow_form(graph)

        self.log_debug(
            f"Max flow {value:.6g}; cut of {len(min_cut)} edge(s), {len(paths.paths)} path(s)"
        )
        return FlowResult(
            flow_form=flow_form,
            value=value,
            capacity=capacity,
            min_cut=min_cut,
            partition=partition,
            oriented_cut=oriented_cut,
            paths=paths,
            circulation=circulation,
        )

    def _network(
        self, graph: Graph, capacity: Capacity, V1: FrozenSet[int], V2: FrozenSet[int]
    ) -> Tuple[nx.DiGraph, Dict[Tuple[int, int], List[int]]]:
        """Doubled arcs with summed parallel capacities, plus a super source and sink"""
        bundles: Dict[Tuple[int, int], List[int]] = {}
        for eid in sorted(graph.edges):
            a, b = graph.edges[eid]
            if a == b:
                continue
            bundles.setdefault((min(a, b), max(a, b)), []).append(eid)

        pairs = list(bundles)
        if self.arc_order_seed is not None:
            order = np.random.default_rng(self.arc_order_seed).permutation(len(pairs))
            pairs = [pairs[k] for k in order]

        network = nx.DiGraph()
        network.add_nodes_from([self.SOURCE, *graph.vertices, self.SINK])
        for a, b in pairs:
            c = math.fsum(capacity[e] for e in bundles[(a, b)])
            network.add_edge(a, b, capacity=c)
            network.add_edge(b, a, capacity=c)

        infinite = 1.0 + capacity.total()
        for v in sorted(V1):
            network.add_edge(self.SOURCE, v, capacity=infinite)
        for v in sorted(V2):
            network.add_edge(v, self.SINK, capacity=infinite)
        return network, {pair: bundles[pair] for pair in pairs}


def cut_partition(graph: Graph, cut: Iterable[int], V1: Iterable[int], V2: Iterable[int]) -> CutPartition:
    """V*1, V*2 by reachability from V1, V2 in E \\ C*, and the cut endpoints on each side"""
    cut = frozenset(cut)
    source_side = _reachable(graph, V1, cut)
    sink_side = _reachable(graph, V2, cut)
    endpoints = {v for e in cut for v in graph.edges[e]}
    return CutPartition(
        source_side=source_side,
        sink_side=sink_side,
        source_cut_vertices=frozenset(endpoints & source_side),
        sink_cut_vertices=frozenset(endpoints & sink_side),
    )


def _reachable(graph: Graph, start: Iterable[int], blocked: FrozenSet[int]) -> FrozenSet[int]:
    seen = set(start)
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        for arc in graph.arcs_from(v):
            if arc.edge in blocked or arc.head in seen:
                continue
            seen.add(arc.head)
            queue.append(arc.head)
    return frozenset(seen)


def max_flow_min_cut(
    graph: Graph,
    capacity: Capacity,
    V1: Iterable[int],
    V2: Iterable[int],
    settings: Optional[Settings] = None,
    arc_order_seed: Optional[int] = None,
) -> FlowResult:
    """Maximal dominated flow from V1 to V2 and a minimal cut"""
    return MaxFlowSolver(settings, arc_order_seed=arc_order_seed).solve(graph, capacity, V1, V2)


def decompose(
    flow_form: OneForm,
    V1: Iterable[int],
    V2: Iterable[int],
    tolerance: float = 1e-12,
) -> Tuple[PathFlow, OneForm]:
    """
    Split a flow form into simple source-to-sink paths and a circulation.

    The paths' flow form plus the circulation equals the input. An acyclic
    input comes back with a zero circulation.

    Raises:
        NotAFlow: If the divergence is nonzero off V1 ∪ V2 or negative on V1.
    """
    V1, V2 = frozenset(V1), frozenset(V2)
    div = divergence(flow_form)
    for v, x in div.items():
        if v in V1:
            if x < -FLOW_DIVERGENCE_TOLERANCE:
                raise NotAFlow(f"Negative outflow {x:.3g} at source {v}")
        elif v not in V2 and abs(x) > FLOW_DIVERGENCE_TOLERANCE:
            raise NotAFlow(f"Divergence {x:.3g} at non-terminal vertex {v}")
    return _decompose(flow_form, V1, V2, tolerance)


def _decompose(
    flow_form: OneForm, V1: FrozenSet[int], V2: FrozenSet[int], tolerance: float
) -> Tuple[PathFlow, OneForm]:
    graph = flow_form.graph
    remaining: Dict[Tuple[int, int], float] = {}
    outgoing: Dict[int, List[Arc]] = {v: [] for v in graph.vertices}
    for arc in graph.arcs():
        x = flow_form(arc)
        if x > tolerance and arc.tail != arc.head:
            remaining[(arc.edge, arc.sign)] = x
            outgoing[arc.tail].append(arc)

    def next_arc(v: int) -> Optional[Arc]:
        arcs = outgoing[v]
        while arcs and remaining[(arcs[0].edge, arcs[0].sign)] <= tolerance:
            arcs.pop(0)
        return arcs[0] if arcs else None

    def walk(start: int) -> Tuple[str, List[Arc]]:
        position = {start: 0}
        arcs: List[Arc] = []
        v = start
        while True:
            if v in V2 and arcs:
                return "path", arcs
            arc = next_arc(v)
            if arc is None:
                return "stuck", arcs
            if arc.head in position:
                return "cycle", arcs[position[arc.head]:] + [arc]
            arcs.append(arc)
            v = arc.head
            position[v] = len(arcs)

    def consume(arcs: List[Arc]) -> float:
        m = min(remaining[(a.edge, a.sign)] for a in arcs)
        for a in arcs:
            remaining[(a.edge, a.sign)] -= m
        return m

    paths: List[FlowPath] = []
    cycles = {e: 0.0 for e in graph.edges}

    def strip(arcs: List[Arc]) -> None:
        m = consume(arcs)
        for a in arcs:
            cycles[a.edge] += a.sign * m

    for s in sorted(V1):
        while next_arc(s) is not None:
            kind, arcs = walk(s)
            if kind == "path":
                paths.append(FlowPath(tuple(arcs), consume(arcs)))
            elif kind == "cycle":
                strip(arcs)
            else:
                break

    # whatever is left off the source walks is circulation
    for v in graph.vertices:
        while next_arc(v) is not None:
            kind, arcs = walk(v)
            if kind != "cycle":
                break
            strip(arcs)

    return PathFlow(tuple(paths)), OneForm(graph, cycles)
