"""
Oriented dual graph of an admissible planar complex.

Bounded face ``f`` becomes interior dual vertex ``f`` (same id); boundary
edge ``E∂[k]`` becomes boundary dual vertex ``F + k``. Dual edge ids equal
primal edge ids. The dual of primal edge ``k = (a, b)`` runs from the vertex
for the region left of ``(a, b)`` to the vertex for the region on its right,
with the exterior standing in as the boundary vertex of the corresponding
boundary edge. Under this orientation curl on the primal equals divergence
on the dual.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Optional, Tuple

from exceptions import NotAdmissible
from forms import OneForm, boundary_tv, flux
from graph import Arc, Graph
from logger import get_logger
from planar_complex import OUTER, PlanarComplex, Point, boundary_complex, is_admissible

log = get_logger("dual")


@dataclass(frozen=True, eq=False)
class DualGraph:
    graph: Graph
    primal: PlanarComplex
    boundary_arcs: Tuple[Arc, ...]
    coords: Dict[int, Point]

    @property
    def num_faces(self) -> int:
        return self.primal.num_faces

    @cached_property
    def interior(self) -> FrozenSet[int]:
        return frozenset(range(self.num_faces))

    @cached_property
    def boundary(self) -> FrozenSet[int]:
        return frozenset(range(self.num_faces, self.num_faces + len(self.boundary_arcs)))

    @cached_property
    def _boundary_index(self) -> Dict[Tuple[int, int], int]:
        return {(arc.edge, arc.sign): self.num_faces + k for k, arc in enumerate(self.boundary_arcs)}

    def boundary_vertex(self, arc: Arc) -> int:
        """v_e for a boundary edge e of E∂"""
        return self._boundary_index[(arc.edge, arc.sign)]

    def face_of(self, dual_vertex: int) -> Optional[int]:
        return dual_vertex if dual_vertex < self.num_faces else None

    def dual_arc(self, primal_arc: Arc) -> Arc:
        """e ↦ e⊥, orientation reversal preserved"""
        return self.graph.arc(primal_arc.edge, primal_arc.sign)

    def primal_arc(self, dual_arc: Arc) -> Arc:
        return self.primal.graph.arc(dual_arc.edge, dual_arc.sign)

    @property
    def edge_map(self) -> Dict[int, int]:
        return {e: e for e in self.primal.graph.edges}

    def to_dict(self) -> Dict:
        return {
            "vertices": [
                {"id": v, "x": self.coords[v][0], "y": self.coords[v][1], "boundary": v in self.boundary}
                for v in self.graph.vertices
            ],
            "edges": [[a, b] for _, (a, b) in sorted(self.graph.edges.items())],
            "dual_of": [[e, e] for e in sorted(self.graph.edges)],
        }


def _boundary_point(c: PlanarComplex, arc: Arc) -> Point:
    (x0, y0), (x1, y1) = c.coords[arc.tail], c.coords[arc.head]
    dx, dy = x1 - x0, y1 - y0
    # E∂ runs counterclockwise, so the outward normal is on the right
    return (0.5 * (x0 + x1) + 0.25 * dy, 0.5 * (y0 + y1) - 0.25 * dx)


def dualize(c: PlanarComplex) -> DualGraph:
    """
    Construct the oriented dual graph.

    Args:
        c: Admissible planar complex.

    Returns:
        DualGraph whose edge ids coincide with the primal edge ids.

    Raises:
        NotAdmissible: If some boundary edge lies on no bounded face.
    """
    if not is_admissible(c):
        raise NotAdmissible("Dual graph requires an admissible complex")

    bc = boundary_complex(c)
    num_faces = c.num_faces
    boundary_index = {(arc.edge, arc.sign): num_faces + k for k, arc in enumerate(bc.edges)}

    def side(eid: int, sign: int) -> int:
        fid = c.face_of_arc[(eid, sign)]
        if fid != OUTER:
            return fid
        # the exterior next to this arc is the boundary vertex of its reverse
        return boundary_index[(eid, -sign)]

    dual_edges = {eid: (side(eid, 1), side(eid, -1)) for eid in c.graph.edges}
    vertices = tuple(range(num_faces + len(bc.edges)))
    graph = Graph(vertices, dual_edges)

    coords: Dict[int, Point] = {fid: c.face_interior_point(fid) for fid in range(num_faces)}
    for k, arc in enumerate(bc.edges):
        coords[num_faces + k] = _boundary_point(c, arc)

    loops = sum(1 for a, b in dual_edges.values() if a == b)
    log.debug(f"Dual graph: {num_faces} faces, {len(bc.edges)} boundary vertices, {loops} loop(s)")
    return DualGraph(graph=graph, primal=c, boundary_arcs=bc.edges, coords=coords)


def push_form(alpha: OneForm, dual: DualGraph) -> OneForm:
    """α⊥(e⊥) = α(e)"""
    return OneForm(dual.graph, alpha.values)


def pull_form(beta: OneForm, dual: DualGraph) -> OneForm:
    """Inverse of ``push_form``"""
    return OneForm(dual.primal.graph, beta.values)


def dual_hypotheses(beta: OneForm, dual: DualGraph, tolerance: float = 1e-9) -> Dict[str, float]:
    """Flux and boundary total variation of a dual form, with (h1⊥)/(h2⊥) flags"""
    fx = flux(beta, dual.boundary)
    tv = boundary_tv(beta, dual.boundary)
    return {
        "flux": fx,
        "tv": tv,
        "h1": abs(fx) <= tolerance and tv <= 1 + tolerance,
        "h2": abs(abs(fx) - 1) <= tolerance and abs(tv - 1) <= tolerance,
    }
