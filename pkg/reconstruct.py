"""
Rebuild a vertex function from a corrected 1-form.

``integrate_curl_free`` handles forms without curl. ``reconstruct_with_singularity``
handles one face carrying an integer curl n: a shortest primal path from the
exceptional boundary edge to that face is duplicated, the arcs on its right are
moved onto the copies, and the form is integrated on the cut-open graph. Those
arcs pick up a jump of -n that the projection onto [-1/2, 1/2] does not see.
"""

import math
from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Tuple

import networkx as nx

from exceptions import InternalConsistencyError, NonzeroCurl, PreconditionViolated
from forms import OneForm, VertexFunction, curl, project_pi, snap_integral
from graph import Arc, Graph
from logger import get_logger
from planar_complex import OUTER, PlanarComplex, boundary_complex

log = get_logger("reconstruct")


def integrate_curl_free(
    c: PlanarComplex,
    base: Tuple[int, float],
    alpha: OneForm,
    tolerance: float = 1e-9,
) -> VertexFunction:
    """
    Integrate a curl-free form along a breadth-first spanning tree.

    Args:
        c: Connected planar complex.
        base: Base vertex and the value it takes.
        alpha: Form on the complex's edges with zero curl on every face.
        tolerance: Largest curl (and edge mismatch) treated as zero.

    Returns:
        ũ with ũ(base) = value and dũ = α on every edge.

    Raises:
        NonzeroCurl: If some face has curl beyond ``tolerance``.
        PreconditionViolated: If the complex is disconnected.
    """
    charge = curl(alpha, c)
    bad = {f: x for f, x in charge.values.items() if abs(x) > tolerance}
    if bad:
        fid = min(bad)
        raise NonzeroCurl(f"Face {fid} has curl {bad[fid]:.6g} ({len(bad)} face(s) in total)")
    if not c.graph.is_connected():
        raise PreconditionViolated("Complex is not connected", "connected")

    v0, value = base
    u = _integrate_tree(c.graph, v0, value, alpha)
    mismatch = _worst_mismatch(u, alpha)
    if mismatch is not None and mismatch[1] > tolerance:
        raise NonzeroCurl(f"Integration is inconsistent on edge {mismatch[0]} by {mismatch[1]:.3g}")
    return VertexFunction(u)


def _integrate_tree(graph: Graph, v0: int, value: float, alpha: OneForm) -> Dict[int, float]:
    u = {v0: value}
    for a, b in nx.bfs_edges(graph.to_networkx(), v0):
        u[b] = u[a] + alpha.along(a, b)
    return u


def _worst_mismatch(u: Dict[int, float], alpha: OneForm) -> Optional[Tuple[int, float]]:
    worst = None
    for e, (a, b) in alpha.graph.edges.items():
        gap = abs(u[b] - u[a] - alpha.values[e])
        if worst is None or gap > worst[1]:
            worst = (e, gap)
    return worst


def spanning_walk(graph: Graph, start: int) -> List[Arc]:
    """Closed depth-first walk from ``start`` through every vertex of its component"""
    walk: List[Arc] = []
    for a, b, kind in nx.dfs_labeled_edges(graph.to_networkx(), start):
        if a == b:
            continue
        if kind == "forward":
            walk.append(graph.find_arc(a, b))
        elif kind == "reverse":
            walk.append(graph.find_arc(b, a))
    return walk


def walk_sum(alpha: OneForm, walk: List[Arc]) -> float:
    return math.fsum(alpha(arc) for arc in walk)


def integrate_along_walk(
    graph: Graph, base: Tuple[int, float], alpha: OneForm, tolerance: float = 1e-9
) -> VertexFunction:
    """
    Integrate along a closed spanning walk, checking every revisit.

    Raises:
        NonzeroCurl: If a vertex is reached twice with different values.
    """
    v0, value = base
    u = {v0: value}
    current = value
    for arc in spanning_walk(graph, v0):
        current += alpha(arc)
        if arc.head in u:
            if abs(u[arc.head] - current) > tolerance:
                raise NonzeroCurl(f"Walk returns to {arc.head} off by {u[arc.head] - current:.3g}")
            current = u[arc.head]
        else:
            u[arc.head] = current
    return VertexFunction(u)


def _normalize_e0(c: PlanarComplex, e0: Arc) -> Arc:
    boundary = boundary_complex(c).edges
    for arc in boundary:
        if arc.edge == e0.edge:
            if arc.sign != e0.sign:
                log.debug(f"Exceptional edge {e0.tail}->{e0.head} given clockwise; reversed")
            return arc
    raise PreconditionViolated(f"Edge {e0.tail}->{e0.head} is not a boundary edge", "e0")


def _check_boundary(c: PlanarComplex, u: VertexFunction, alpha: OneForm, e0: Arc, tolerance: float) -> None:
    for arc in boundary_complex(c).edges:
        du = u[arc.head] - u[arc.tail]
        if abs(project_pi(du) - alpha(arc)) > tolerance:
            raise PreconditionViolated(
                f"π(du) = {project_pi(du):.6g} but α̃ = {alpha(arc):.6g} on boundary edge {arc.tail}->{arc.head}",
                "boundary",
            )
        if arc.edge != e0.edge and abs(project_pi(du) - du) > tolerance:
            raise PreconditionViolated(
                f"π(du) ≠ du on boundary edge {arc.tail}->{arc.head} besides the exceptional edge", "h0"
            )


@dataclass(frozen=True, eq=False)
class CutOpen:
    """
    A complex cut open along a primal path from the exceptional edge to the singular face.

    Attributes:
        graph: Original vertices plus one duplicate per path vertex.
        alpha: The form carried over; duplicated path edges keep their values.
        path: Path vertices, from the tail of e0 to a vertex of the singular face.
        copies: Duplicate id -> original vertex.
        shifted: Arcs leaving the path on its right, now attached to a duplicate.
    """
    graph: Graph
    alpha: OneForm
    path: Tuple[int, ...]
    copies: Dict[int, int]
    shifted: Tuple[Arc, ...]


def _sweep(
    c: PlanarComplex,
    v: int,
    start: Arc,
    f0: int,
    stop: Optional[Arc] = None,
    from_outside: bool = False,
) -> Optional[List[Arc]]:
    """
    Arcs met turning counterclockwise at ``v`` after ``start``, up to ``stop``
    or, without a stop arc, up to the corner lying in ``f0``.

    None when the turn crosses the exterior (its first corner excepted with
    ``from_outside``) or enters ``f0`` before reaching ``stop``.
    """
    around = c.rotation[v]
    i = around.index(start)
    corner = c.left_face(start)
    collected: List[Arc] = []
    for step in range(1, len(around) + 1):
        if stop is None and corner == f0:
            return collected
        if corner == f0 or (corner == OUTER and not (from_outside and step == 1)):
            return None
        arc = around[(i + step) % len(around)]
        if arc == stop:
            return collected
        collected.append(arc)
        corner = c.left_face(arc)
    return None


def _outside_of(c: PlanarComplex, e0: Arc) -> Arc:
    """Arc before e0 at its tail; the exterior lies between the two"""
    around = c.rotation[e0.tail]
    return around[around.index(e0) - 1]


def _paths_to_face(c: PlanarComplex, f0: int, e0: Arc) -> Iterator[List[Arc]]:
    """Breadth-first paths from the tail of e0 to the boundary of f0, shortest and lowest ids first"""
    targets = set(c.face_vertices(f0))
    v0 = e0.tail
    if v0 in targets:
        yield []
    outside = _outside_of(c, e0)
    parent: Dict[int, Optional[Arc]] = {v0: None}
    queue = deque([v0])
    while queue:
        b = queue.popleft()
        back = parent[b]
        for arc in sorted(c.graph.arcs_from(b), key=lambda a: (a.head, a.edge)):
            if arc.head in parent or arc.edge == e0.edge:
                continue
            if back is None:
                side = _sweep(c, b, outside, f0, stop=arc, from_outside=True)
            else:
                side = _sweep(c, b, back.reversed(), f0, stop=arc)
            if side is None:
                continue
            parent[arc.head] = arc
            if arc.head not in targets:
                queue.append(arc.head)
                continue
            path: List[Arc] = []
            step = arc
            while step is not None:
                path.append(step)
                step = parent[step.tail]
            yield path[::-1]


def _right_sides(c: PlanarComplex, arcs: List[Arc], f0: int, e0: Arc) -> Optional[Dict[int, List[Arc]]]:
    """Arcs on the right of the path at each path vertex, in path order"""
    outside = _outside_of(c, e0)
    v0 = e0.tail
    if not arcs:
        side = _sweep(c, v0, outside, f0, from_outside=True)
        return None if side is None else {v0: side}

    sides = {v0: _sweep(c, v0, outside, f0, stop=arcs[0], from_outside=True)}
    for back, forward in zip(arcs, arcs[1:]):
        sides[back.head] = _sweep(c, back.head, back.reversed(), f0, stop=forward)
    last = arcs[-1]
    sides[last.head] = _sweep(c, last.head, last.reversed(), f0)
    if any(side is None for side in sides.values()):
        return None
    return sides


def cut_open_along_path(
    c: PlanarComplex,
    alpha: OneForm,
    f0: int,
    e0: Arc,
    n: int,
    tolerance: float = 1e-9,
) -> CutOpen:
    """
    Duplicate a shortest primal path from the tail of e0 to the boundary of f0.

    Arcs leaving the path on its right are re-attached to the duplicates, so
    walking around f0 from a path vertex to its duplicate picks up -n. Every
    such arc must keep its projected value under that shift, which only fails
    for arcs valued ±1/2 with the tie on the wrong side; the next candidate
    path is tried then.

    Args:
        c: Admissible planar complex.
        alpha: Form with values in [-1/2, 1/2].
        f0: The singular face.
        e0: Counterclockwise exceptional boundary arc.
        n: Integer curl of ``f0``.
        tolerance: Numerical tolerance for the shift check.

    Raises:
        PreconditionViolated: With clause ``cut`` if no candidate path works.
    """
    for arcs in _paths_to_face(c, f0, e0):
        sides = _right_sides(c, arcs, f0, e0)
        if sides is None:
            continue
        shifted = [
            arc
            for side in sides.values()
            for arc in side
            if not (arc.head in sides and arc.reversed() in sides[arc.head])
        ]
        broken = [a for a in shifted if abs(project_pi(alpha(a) - n) - alpha(a)) > tolerance]
        if broken:
            log.debug(f"Path {[e0.tail] + [a.head for a in arcs]} rejected; {len(broken)} arc(s) change under the shift")
            continue
        return _duplicate(c, alpha, arcs, sides, shifted)
    raise PreconditionViolated(f"No path from {e0.tail} to face {f0} survives the integer shift", "cut")


def _duplicate(
    c: PlanarComplex,
    alpha: OneForm,
    arcs: List[Arc],
    sides: Dict[int, List[Arc]],
    shifted: List[Arc],
) -> CutOpen:
    first = c.graph.next_vertex_id()
    duplicate = {p: first + k for k, p in enumerate(sides)}
    moved = {(a.edge, a.sign) for side in sides.values() for a in side}

    edges = {}
    for e, (a, b) in c.graph.edges.items():
        edges[e] = (duplicate[a] if (e, 1) in moved else a, duplicate[b] if (e, -1) in moved else b)
    values = dict(alpha.values)
    eid = c.graph.next_edge_id()
    for arc in arcs:
        a, b = c.graph.edges[arc.edge]
        edges[eid] = (duplicate[a], duplicate[b])
        values[eid] = alpha.values[arc.edge]
        eid += 1

    graph = Graph(c.vertices + tuple(duplicate.values()), edges)
    return CutOpen(
        graph=graph,
        alpha=OneForm(graph, values),
        path=tuple(sides),
        copies={d: p for p, d in duplicate.items()},
        shifted=tuple(shifted),
    )


def reconstruct_with_singularity(
    c: PlanarComplex,
    u: VertexFunction,
    alpha: OneForm,
    f0: int,
    e0: Arc,
    tolerance: float = 1e-9,
) -> VertexFunction:
    """
    Build ũ with ũ = u on the boundary and π(dũ) = α̃ on every edge.

    Args:
        c: Admissible planar complex.
        u: Boundary datum (values on the boundary vertices are used).
        alpha: Corrected form with values in [-1/2, 1/2], curl-free off ``f0``.
        f0: The face carrying the integer curl.
        e0: Exceptional boundary edge; reversed if given clockwise.
        tolerance: Numerical tolerance for the precondition checks.

    Raises:
        PreconditionViolated: Naming the failed clause (range, curl, f0,
            boundary, h0, e0 or cut).
    """
    if any(abs(x) > 0.5 + tolerance for x in alpha.values.values()):
        raise PreconditionViolated("Form takes values outside [-1/2, 1/2]", "range")
    if not 0 <= f0 < c.num_faces:
        raise PreconditionViolated(f"Face {f0} does not exist", "f0")
    e0 = _normalize_e0(c, e0)
    _check_boundary(c, u, alpha, e0, tolerance)

    charge = curl(alpha, c)
    stray = {f: x for f, x in charge.values.items() if f != f0 and abs(x) > tolerance}
    if stray:
        fid = min(stray)
        raise NonzeroCurl(f"Face {fid} has curl {stray[fid]:.6g} but is not the singular face")
    n = snap_integral({f0: charge[f0]}, tolerance, "curl")[f0]

    base = (e0.tail, u[e0.tail])
    if n == 0:
        log.debug("Singular face carries no curl; integrating directly")
        return integrate_curl_free(c, base, alpha, tolerance)

    cut = cut_open_along_path(c, alpha, f0, e0, n, tolerance)
    lifted = _integrate_tree(cut.graph, base[0], base[1], cut.alpha)
    if len(lifted) != len(cut.graph.vertices):
        raise InternalConsistencyError("Cut-open graph is disconnected")
    mismatch = _worst_mismatch(lifted, cut.alpha)
    if mismatch is not None and mismatch[1] > tolerance:
        raise InternalConsistencyError(f"Cut-open graph still carries curl on edge {mismatch[0]}")
    for d, p in cut.copies.items():
        if abs(lifted[d] - lifted[p] + n) > tolerance:
            raise InternalConsistencyError(f"Duplicate of {p} is off by {lifted[d] - lifted[p]:.6g}, expected {-n}")

    result = VertexFunction({v: lifted[v] for v in c.vertices})
    for e, (a, b) in c.graph.edges.items():
        if abs(project_pi(result[b] - result[a]) - alpha.values[e]) > tolerance:
            raise InternalConsistencyError(f"Reconstruction misses α̃ on edge {e} = ({a}, {b})")
    log.debug(f"Reconstructed around face {f0} with curl {n}; path {cut.path}, {len(cut.shifted)} arc(s) shifted")
    return result
