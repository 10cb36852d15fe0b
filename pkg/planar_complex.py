"""
Planar complexes: straight-line planar graphs with their bounded faces and
boundary complex.

Faces are traced from the rotation system. At each vertex the neighbours are
sorted counterclockwise by angle; the half-edge following ``u -> v`` in a face
walk is ``v -> w`` with ``w`` the neighbour just clockwise of ``u`` around
``v``. Every walk keeps its face on the left, so bounded faces come out
counterclockwise (positive signed area) and the exterior walk of each
connected component clockwise (nonpositive area, zero for trees).
"""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Sequence, Tuple

import numpy as np

from exceptions import DuplicateEdge, MalformedInput, NonPlanarEmbedding, NotBidirectional
from graph import Arc, Edge, Graph
from logger import get_logger

log = get_logger("planar_complex")

OUTER = -1
Point = Tuple[float, float]


@dataclass(frozen=True, eq=False)
class BoundaryComplex:
    """Counterclockwise boundary edges E∂ and their endpoints V∂"""
    edges: Tuple[Arc, ...]
    vertices: FrozenSet[int]

    def __len__(self) -> int:
        return len(self.edges)

    def index_of(self, arc: Arc) -> int:
        for k, e in enumerate(self.edges):
            if e.edge == arc.edge and e.sign == arc.sign:
                return k
        raise KeyError(f"{arc} is not a boundary edge")


@dataclass(frozen=True, eq=False)
class PlanarComplex:
    """
    Planar graph together with its bounded faces.

    Attributes:
        graph: Underlying simple graph; edge ids are positions in the input edge list.
        coords: Vertex coordinates.
        faces: Counterclockwise arc cycles of the bounded faces.
        outer_cycles: Clockwise arc cycles of the exterior face, one per component.
    """
    graph: Graph
    coords: Mapping[int, Point]
    faces: Tuple[Tuple[Arc, ...], ...]
    outer_cycles: Tuple[Tuple[Arc, ...], ...]

    @property
    def vertices(self) -> Tuple[int, ...]:
        return self.graph.vertices

    @property
    def num_faces(self) -> int:
        return len(self.faces)

    @property
    def outer_boundary(self) -> Tuple[Arc, ...]:
        """Clockwise walk of f_out (component walks concatenated)"""
        return tuple(arc for cycle in self.outer_cycles for arc in cycle)

    @cached_property
    def face_of_arc(self) -> Dict[Tuple[int, int], int]:
        """(edge, sign) -> face id on the left of that arc, ``OUTER`` for f_out"""
        lookup: Dict[Tuple[int, int], int] = {}
        for fid, cycle in enumerate(self.faces):
            for arc in cycle:
                lookup[(arc.edge, arc.sign)] = fid
        for cycle in self.outer_cycles:
            for arc in cycle:
                lookup[(arc.edge, arc.sign)] = OUTER
        return lookup

    @cached_property
    def rotation(self) -> Dict[int, Tuple[Arc, ...]]:
        """Arcs leaving each vertex, counterclockwise by direction"""
        order: Dict[int, Tuple[Arc, ...]] = {}
        for v in self.vertices:
            x0, y0 = self.coords[v]
            order[v] = tuple(
                sorted(
                    self.graph.arcs_from(v),
                    key=lambda a: math.atan2(self.coords[a.head][1] - y0, self.coords[a.head][0] - x0),
                )
            )
        return order

    def left_face(self, arc: Arc) -> int:
        return self.face_of_arc[(arc.edge, arc.sign)]

    def face_vertices(self, fid: int) -> List[int]:
        return [arc.tail for arc in self.faces[fid]]

    def face_polygon(self, fid: int) -> np.ndarray:
        return np.array([self.coords[v] for v in self.face_vertices(fid)], dtype=float)

    def face_interior_point(self, fid: int) -> Point:
        return interior_point(self.face_polygon(fid))

    def boundary(self) -> BoundaryComplex:
        return boundary_complex(self)

    def euler_characteristic(self) -> int:
        """|V| - |E| + |F| + (number of components); 2 per admissible component"""
        return self.graph.num_vertices - self.graph.num_edges + self.num_faces + len(self.graph.components)

    def to_dict(self) -> Dict:
        """JSON document with signed edge indices (``~k`` is the reverse of edge k)"""
        return {
            "vertices": [{"id": v, "x": self.coords[v][0], "y": self.coords[v][1]} for v in self.vertices],
            "edges": [[a, b] for _, (a, b) in sorted(self.graph.edges.items())],
            "faces": [[_signed_index(arc) for arc in cycle] for cycle in self.faces],
            "boundary": [_signed_index(arc) for arc in boundary_complex(self).edges],
        }

    @classmethod
    def from_dict(cls, data: Dict, check_planarity: bool = True) -> "PlanarComplex":
        try:
            coords = {int(v["id"]): (float(v["x"]), float(v["y"])) for v in data["vertices"]}
            pairs = [(int(a), int(b)) for a, b in data["edges"]]
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedInput(f"Invalid complex document: {e}") from e
        return build_complex(coords, pairs, check_planarity=check_planarity)

    def __repr__(self) -> str:
        return f"PlanarComplex(|V|={self.graph.num_vertices}, |E|={self.graph.num_edges}, |F|={self.num_faces})"


def _signed_index(arc: Arc) -> int:
    return arc.edge if arc.sign > 0 else ~arc.edge


def arc_from_signed_index(graph: Graph, index: int) -> Arc:
    return graph.arc(index, 1) if index >= 0 else graph.arc(~index, -1)


def signed_area(polygon: np.ndarray) -> float:
    """Shoelace signed area, positive for counterclockwise polygons"""
    if len(polygon) < 3:
        return 0.0
    x, y = polygon[:, 0], polygon[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def point_in_polygon(point: Point, polygon: np.ndarray) -> bool:
    """Strict interior test by ray casting"""
    px, py = point
    x, y = polygon[:, 0], polygon[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    straddles = (y > py) != (yn > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_cross = x + (py - y) * (xn - x) / (yn - y)
    return bool(np.count_nonzero(straddles & (px < x_cross)) % 2 == 1)


def interior_point(polygon: np.ndarray) -> Point:
    """Centroid when it falls inside, else the centroid of an ear"""
    area = signed_area(polygon)
    if abs(area) > 0:
        x, y = polygon[:, 0], polygon[:, 1]
        xn, yn = np.roll(x, -1), np.roll(y, -1)
        cross = x * yn - xn * y
        c = (float(np.sum((x + xn) * cross) / (6 * area)), float(np.sum((y + yn) * cross) / (6 * area)))
        if point_in_polygon(c, polygon):
            return c
    n = len(polygon)
    for i in range(n):
        a, b, c = polygon[i - 1], polygon[i], polygon[(i + 1) % n]
        turn = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        if turn <= 0:
            continue
        candidate = (float((a[0] + b[0] + c[0]) / 3), float((a[1] + b[1] + c[1]) / 3))
        if point_in_polygon(candidate, polygon):
            return candidate
    return (float(polygon[:, 0].mean()), float(polygon[:, 1].mean()))


def _orient(p: np.ndarray, q: np.ndarray, r: np.ndarray) -> np.ndarray:
    return (q[..., 0] - p[..., 0]) * (r[..., 1] - p[..., 1]) - (q[..., 1] - p[..., 1]) * (r[..., 0] - p[..., 0])


def _on_segment(a: np.ndarray, b: np.ndarray, x: np.ndarray, eps: float) -> np.ndarray:
    lo, hi = np.minimum(a, b) - eps, np.maximum(a, b) + eps
    return np.all((x >= lo) & (x <= hi), axis=-1)


def check_straight_line_embedding(coords: Mapping[int, Point], pairs: Sequence[Edge], tolerance: float = 1e-12) -> None:
    """Raise NonPlanarEmbedding if two segments meet anywhere but a shared endpoint"""
    if not pairs:
        return
    points = np.array([coords[v] for v in coords], dtype=float)
    if len(np.unique(points, axis=0)) != len(points):
        raise NonPlanarEmbedding("Two vertices share the same coordinates")

    scale = max(1.0, float(np.abs(points).max()))
    eps = tolerance * scale
    area_eps = tolerance * scale * scale
    ids = np.array(pairs, dtype=np.int64)
    P = np.array([coords[a] for a, _ in pairs], dtype=float)
    Q = np.array([coords[b] for _, b in pairs], dtype=float)

    for k in range(len(pairs) - 1):
        p, q = P[k], Q[k]
        r, s = P[k + 1:], Q[k + 1:]
        rest = ids[k + 1:]
        shared = (rest[:, 0] == ids[k, 0]) | (rest[:, 0] == ids[k, 1]) | (rest[:, 1] == ids[k, 0]) | (rest[:, 1] == ids[k, 1])

        o1, o2 = _orient(p, q, r), _orient(p, q, s)
        o3, o4 = _orient(r, s, p), _orient(r, s, q)
        z1, z2, z3, z4 = (np.abs(o) <= area_eps for o in (o1, o2, o3, o4))
        s1, s2, s3, s4 = (np.sign(o) * ~z for o, z in ((o1, z1), (o2, z2), (o3, z3), (o4, z4)))

        proper = (s1 * s2 < 0) & (s3 * s4 < 0)
        touching = (
            (z1 & _on_segment(p, q, r, eps)) | (z2 & _on_segment(p, q, s, eps))
            | (z3 & _on_segment(r, s, p, eps)) | (z4 & _on_segment(r, s, q, eps))
        )
        bad = proper | (touching & ~shared)
        if bad.any():
            j = k + 1 + int(np.argmax(bad))
            raise NonPlanarEmbedding(f"Edges {tuple(pairs[k])} and {tuple(pairs[j])} intersect")


def _normalize_edges(vertices: Mapping[int, Point], edges: Iterable[Edge], oriented: bool) -> List[Edge]:
    pairs: List[Edge] = []
    seen_oriented = set()
    seen_unordered: Dict[FrozenSet[int], Edge] = {}
    for a, b in edges:
        a, b = int(a), int(b)
        if a not in vertices or b not in vertices:
            raise MalformedInput(f"Edge ({a}, {b}) references an unknown vertex")
        if a == b:
            raise MalformedInput(f"Loop at vertex {a} is not allowed in a planar complex")
        if oriented:
            if (a, b) in seen_oriented:
                raise DuplicateEdge(f"Edge ({a}, {b}) listed twice")
            seen_oriented.add((a, b))
        key = frozenset((a, b))
        if key in seen_unordered:
            if oriented:
                continue
            raise DuplicateEdge(f"Edge ({a}, {b}) listed twice")
        seen_unordered[key] = (a, b)
        pairs.append((a, b))
    if oriented:
        missing = [(a, b) for a, b in seen_oriented if (b, a) not in seen_oriented]
        if missing:
            raise NotBidirectional(f"Edge {missing[0]} has no reverse")
    return pairs


def _rotation_system(graph: Graph, coords: Mapping[int, Point], tolerance: float) -> Dict[int, List[int]]:
    rotation: Dict[int, List[int]] = {}
    for v in graph.vertices:
        x0, y0 = coords[v]
        nbrs = sorted(graph.neighbors(v), key=lambda w: math.atan2(coords[w][1] - y0, coords[w][0] - x0))
        for w1, w2 in zip(nbrs, nbrs[1:]):
            d1 = (coords[w1][0] - x0, coords[w1][1] - y0)
            d2 = (coords[w2][0] - x0, coords[w2][1] - y0)
            cross = d1[0] * d2[1] - d1[1] * d2[0]
            dot = d1[0] * d2[0] + d1[1] * d2[1]
            if abs(cross) <= tolerance * math.hypot(*d1) * math.hypot(*d2) and dot > 0:
                raise NonPlanarEmbedding(f"Edges ({v}, {w1}) and ({v}, {w2}) leave vertex {v} in the same direction")
        rotation[v] = nbrs
    return rotation


def _trace_cycles(graph: Graph, rotation: Dict[int, List[int]]) -> List[List[Arc]]:
    position = {v: {w: i for i, w in enumerate(nbrs)} for v, nbrs in rotation.items()}
    visited = set()
    cycles: List[List[Arc]] = []
    for u in graph.vertices:
        for v in rotation[u]:
            if (u, v) in visited:
                continue
            cycle: List[Arc] = []
            a, b = u, v
            while (a, b) not in visited:
                visited.add((a, b))
                cycle.append(graph.find_arc(a, b))
                nbrs = rotation[b]
                a, b = b, nbrs[(position[b][a] - 1) % len(nbrs)]
            cycles.append(cycle)
    return cycles


def build_complex(
    vertices: Mapping[int, Point],
    edges: Iterable[Edge],
    oriented: bool = False,
    check_planarity: bool = True,
    tolerance: float = 1e-12,
) -> PlanarComplex:
    """
    Build a planar complex from coordinates and straight-line edges.

    Args:
        vertices: Vertex id -> (x, y).
        edges: One pair per unordered edge, or with ``oriented=True`` both
            orientations of every edge.
        oriented: Whether ``edges`` lists oriented pairs that must be bidirectional.
        check_planarity: Run the pairwise segment intersection check.
        tolerance: Relative geometric tolerance.

    Returns:
        The complex with faces traced from the rotation system.
    """
    coords = {int(v): (float(x), float(y)) for v, (x, y) in vertices.items()}
    pairs = _normalize_edges(coords, edges, oriented)
    if check_planarity:
        check_straight_line_embedding(coords, pairs, tolerance)

    graph = Graph.from_pairs(sorted(coords), pairs)
    rotation = _rotation_system(graph, coords, tolerance)
    cycles = _trace_cycles(graph, rotation)

    component_of = {v: k for k, comp in enumerate(graph.components) for v in comp}
    by_component: Dict[int, List[Tuple[float, List[Arc]]]] = {}
    for cycle in cycles:
        polygon = np.array([coords[arc.tail] for arc in cycle], dtype=float)
        by_component.setdefault(component_of[cycle[0].tail], []).append((signed_area(polygon), cycle))

    scale = max([1.0] + [abs(c) for p in coords.values() for c in p])
    faces: List[Tuple[Arc, ...]] = []
    outer: List[Tuple[Arc, ...]] = []
    for comp in sorted(by_component):
        entries = by_component[comp]
        k_out = min(range(len(entries)), key=lambda k: entries[k][0])
        outer.append(tuple(entries[k_out][1]))
        for k, (area, cycle) in enumerate(entries):
            if k == k_out:
                continue
            if area <= tolerance * scale * scale:
                raise NonPlanarEmbedding("Face tracing found two exterior cycles in one component")
            faces.append(tuple(cycle))

    complex_ = PlanarComplex(graph=graph, coords=coords, faces=tuple(faces), outer_cycles=tuple(outer))
    if check_planarity and len(graph.components) > 1:
        _reject_nested_components(complex_, component_of)
    log.debug(f"Built {complex_!r}")
    return complex_


def _reject_nested_components(c: PlanarComplex, component_of: Dict[int, int]) -> None:
    for fid in range(c.num_faces):
        polygon = c.face_polygon(fid)
        own = component_of[c.faces[fid][0].tail]
        for v in c.vertices:
            if component_of[v] != own and point_in_polygon(c.coords[v], polygon):
                raise NonPlanarEmbedding(f"Vertex {v} lies inside face {fid} of another component")


def boundary_complex(c: PlanarComplex) -> BoundaryComplex:
    """E∂ as the orientation-reversed exterior walk, counterclockwise"""
    edges = tuple(arc.reversed() for arc in reversed(c.outer_boundary))
    vertices = frozenset(v for arc in edges for v in (arc.tail, arc.head))
    return BoundaryComplex(edges=edges, vertices=vertices)


def is_admissible(c: PlanarComplex) -> bool:
    """Connected, and every boundary edge lies on a bounded face"""
    if c.graph.num_vertices == 0 or not c.graph.is_connected():
        return False
    if c.num_faces == 0:
        return False
    return all(c.left_face(arc) != OUTER for arc in boundary_complex(c).edges)


def face_supported_edges(c: PlanarComplex) -> List[int]:
    return sorted(
        eid for eid in c.graph.edges
        if c.face_of_arc[(eid, 1)] != OUTER or c.face_of_arc[(eid, -1)] != OUTER
    )


def decompose_to_admissible(c: PlanarComplex) -> List[PlanarComplex]:
    """Drop edges on no bounded face and split what remains into components"""
    keep = face_supported_edges(c)
    if not keep:
        log.warning("Complex has no bounded faces; nothing admissible remains")
        return []
    pairs = [c.graph.edges[eid] for eid in keep]
    remaining = Graph.from_pairs(sorted({v for p in pairs for v in p}), pairs)
    parts = []
    for comp in remaining.components:
        comp_pairs = [p for p in pairs if p[0] in comp]
        part = build_complex({v: c.coords[v] for v in sorted(comp)}, comp_pairs, check_planarity=False)
        parts.append(part)
    log.info(f"Decomposed complex into {len(parts)} admissible part(s), dropped {c.graph.num_edges - len(keep)} edge(s)")
    return parts


def complex_from_cells(coords: Mapping[int, Point], pairs: Sequence[Edge]) -> PlanarComplex:
    """Trusted construction used for generated lattices (no intersection check)"""
    return build_complex(coords, pairs, check_planarity=False)
