"""
Generic bidirectional multigraph.

Each undirected edge is stored once under an integer id with a canonical
orientation ``(tail, head)``; the reverse orientation is implied. Parallel
edges and loops are allowed (dual graphs need both). An oriented edge is an
``Arc``: the edge id plus a sign, ``+1`` for the canonical orientation.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, NamedTuple, Optional, Tuple

import networkx as nx

from exceptions import MalformedInput

Edge = Tuple[int, int]


class Arc(NamedTuple):
    """Oriented edge: ``edge`` id traversed from ``tail`` to ``head``"""
    edge: int
    sign: int
    tail: int
    head: int

    def reversed(self) -> "Arc":
        return Arc(self.edge, -self.sign, self.head, self.tail)


@dataclass(frozen=True, eq=False)
class Graph:
    """Bidirectional multigraph with integer vertex and edge ids"""
    vertices: Tuple[int, ...]
    edges: Mapping[int, Edge] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", dict(self.edges))
        known = set(self.vertices)
        if len(known) != len(self.vertices):
            raise MalformedInput("Duplicate vertex ids in graph")
        for eid, (a, b) in self.edges.items():
            if a not in known or b not in known:
                raise MalformedInput(f"Edge {eid} references unknown vertex ({a}, {b})")

    @classmethod
    def from_pairs(cls, vertices: Iterable[int], pairs: Iterable[Edge]) -> "Graph":
        """Build a graph numbering the given pairs 0, 1, 2, ..."""
        return cls(tuple(vertices), {k: (int(a), int(b)) for k, (a, b) in enumerate(pairs)})

    @cached_property
    def incidence(self) -> Dict[int, List[Arc]]:
        """Arcs leaving each vertex, in edge-id order"""
        out: Dict[int, List[Arc]] = {v: [] for v in self.vertices}
        for eid in sorted(self.edges):
            a, b = self.edges[eid]
            out[a].append(Arc(eid, 1, a, b))
            out[b].append(Arc(eid, -1, b, a))
        return out

    @cached_property
    def _pair_index(self) -> Dict[Edge, Arc]:
        index: Dict[Edge, Arc] = {}
        for eid in sorted(self.edges):
            a, b = self.edges[eid]
            index.setdefault((a, b), Arc(eid, 1, a, b))
            index.setdefault((b, a), Arc(eid, -1, b, a))
        return index

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def arc(self, edge: int, sign: int = 1) -> Arc:
        a, b = self.edges[edge]
        return Arc(edge, 1, a, b) if sign > 0 else Arc(edge, -1, b, a)

    def arcs_from(self, v: int) -> List[Arc]:
        return self.incidence[v]

    def arcs(self) -> Iterator[Arc]:
        """Every oriented edge, both orientations"""
        for eid in sorted(self.edges):
            a, b = self.edges[eid]
            yield Arc(eid, 1, a, b)
            yield Arc(eid, -1, b, a)

    def neighbors(self, v: int) -> List[int]:
        return [arc.head for arc in self.incidence[v]]

    def degree(self, v: int) -> int:
        return len(self.incidence[v])

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self._pair_index

    def find_arc(self, u: int, v: int) -> Arc:
        """Lowest-id arc from u to v"""
        try:
            return self._pair_index[(u, v)]
        except KeyError:
            raise KeyError(f"No edge from {u} to {v}") from None

    def subgraph(self, vertices: Iterable[int], edges: Optional[Iterable[int]] = None) -> "Graph":
        """Induced subgraph, or the given edge subset restricted to the vertex set"""
        keep = set(vertices)
        candidates = self.edges.keys() if edges is None else edges
        chosen = {
            eid: self.edges[eid]
            for eid in candidates
            if self.edges[eid][0] in keep and self.edges[eid][1] in keep
        }
        return Graph(tuple(v for v in self.vertices if v in keep), chosen)

    def to_networkx(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(self.vertices)
        for eid, (a, b) in self.edges.items():
            g.add_edge(a, b, key=eid)
        return g

    @cached_property
    def components(self) -> List[FrozenSet[int]]:
        """Connected components, ordered by smallest vertex id"""
        comps = [frozenset(c) for c in nx.connected_components(self.to_networkx())]
        return sorted(comps, key=min)

    def is_connected(self) -> bool:
        return len(self.components) <= 1

    def next_vertex_id(self) -> int:
        return max(self.vertices, default=-1) + 1

    def next_edge_id(self) -> int:
        return max(self.edges, default=-1) + 1

    def to_dict(self) -> Dict:
        return {
            "vertices": [{"id": v} for v in self.vertices],
            "edges": [[a, b] for _, (a, b) in sorted(self.edges.items())],
        }

    def __repr__(self) -> str:
        return f"Graph(|V|={self.num_vertices}, |E|={self.num_edges})"
