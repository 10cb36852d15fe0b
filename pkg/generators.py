"""
Seeded random instances for the oracle suite and the tests.

Every generator takes a ``numpy.random.Generator`` so runs are reproducible.
"""

from typing import Dict, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from flow import Capacity
from forms import OneForm, VertexFunction
from graph import Graph
from lattice import EnergyProfile
from planar_complex import PlanarComplex, boundary_complex, build_complex
from reductions import ChargedGraph


def random_connected_graph(rng: np.random.Generator, n_vertices: int, n_edges: int) -> Graph:
    """Simple connected graph: a random spanning tree plus extra random pairs"""
    n_edges = max(n_vertices - 1, min(n_edges, n_vertices * (n_vertices - 1) // 2))
    order = rng.permutation(n_vertices).tolist()
    pairs = set()
    for k in range(1, n_vertices):
        a, b = order[k], order[int(rng.integers(0, k))]
        pairs.add((min(a, b), max(a, b)))
    while len(pairs) < n_edges:
        a, b = (int(x) for x in rng.choice(n_vertices, size=2, replace=False))
        pairs.add((min(a, b), max(a, b)))
    edges = sorted(pairs)
    flips = rng.random(len(edges)) < 0.5
    return Graph.from_pairs(range(n_vertices), [(b, a) if f else (a, b) for (a, b), f in zip(edges, flips)])


def random_capacity(rng: np.random.Generator, graph: Graph, zero_fraction: float = 0.1) -> Capacity:
    values = rng.random(graph.num_edges)
    values[rng.random(graph.num_edges) < zero_fraction] = 0.0
    return Capacity({e: float(x) for e, x in zip(sorted(graph.edges), values)})


def random_terminals(rng: np.random.Generator, graph: Graph) -> Tuple[List[int], List[int]]:
    vertices = rng.permutation(graph.vertices).tolist()
    k1 = int(rng.integers(1, max(2, len(vertices) // 3) + 1))
    k2 = int(rng.integers(1, max(2, len(vertices) // 3) + 1))
    k1 = min(k1, len(vertices) - 1)
    k2 = min(k2, len(vertices) - k1)
    return sorted(vertices[:k1]), sorted(vertices[k1:k1 + k2])


def grid_complex(
    rng: Optional[np.random.Generator],
    nx_cells: int,
    ny_cells: int,
    jitter: float = 0.0,
    diagonal_fraction: float = 0.0,
) -> PlanarComplex:
    """Grid of nx × ny unit cells, optionally jittered and with random diagonals"""
    index = {}
    coords: Dict[int, Tuple[float, float]] = {}
    for ix in range(nx_cells + 1):
        for iy in range(ny_cells + 1):
            k = len(index)
            index[(ix, iy)] = k
            dx, dy = (rng.uniform(-jitter, jitter, size=2) if rng is not None and jitter > 0 else (0.0, 0.0))
            coords[k] = (ix + float(dx), iy + float(dy))
    pairs = []
    for (ix, iy), k in index.items():
        if (ix + 1, iy) in index:
            pairs.append((k, index[(ix + 1, iy)]))
        if (ix, iy + 1) in index:
            pairs.append((k, index[(ix, iy + 1)]))
    if rng is not None and diagonal_fraction > 0:
        for ix in range(nx_cells):
            for iy in range(ny_cells):
                if rng.random() < diagonal_fraction:
                    if rng.random() < 0.5:
                        pairs.append((index[(ix, iy)], index[(ix + 1, iy + 1)]))
                    else:
                        pairs.append((index[(ix + 1, iy)], index[(ix, iy + 1)]))
    return build_complex(coords, pairs)


def random_admissible_complex(rng: np.random.Generator, max_faces: int = 30) -> PlanarComplex:
    """Jittered grid with diagonals, at most ``max_faces`` faces"""
    while True:
        nx_cells, ny_cells = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        if 2 * nx_cells * ny_cells <= max_faces:
            break
    return grid_complex(rng, nx_cells, ny_cells, jitter=0.15, diagonal_fraction=0.5)


def random_vertex_function(rng: np.random.Generator, vertices: Sequence[int], scale: float = 1.0) -> VertexFunction:
    return VertexFunction({v: float(x) for v, x in zip(vertices, rng.uniform(-scale, scale, size=len(vertices)))})


def random_form(rng: np.random.Generator, graph: Graph, scale: float = 1.0) -> OneForm:
    return OneForm(graph, {e: float(x) for e, x in zip(sorted(graph.edges), rng.uniform(-scale, scale, graph.num_edges))})


def _add_path(values: Dict[int, float], graph: Graph, path: Sequence[int], weight: float) -> None:
    for a, b in zip(path, path[1:]):
        arc = graph.find_arc(a, b)
        values[arc.edge] += arc.sign * weight


def _path_avoiding(nxg: nx.Graph, source: int, target: int, allowed: set) -> Optional[List[int]]:
    sub = nxg.subgraph(allowed | {source, target})
    try:
        return nx.shortest_path(sub, source, target)
    except nx.NetworkXNoPath:
        return None


def charged_instance(
    rng: np.random.Generator,
    flux: int = 0,
    tv_range: Tuple[float, float] = (0.0, 1.0),
    n_vertices: Optional[int] = None,
    dipoles: Optional[int] = None,
) -> ChargedGraph:
    """
    Random charged graph with prescribed flux and boundary variation.

    The form superposes unit path flows between interior vertices (integral
    dipoles), interior circulations with real weights, flows between boundary
    vertices (Dirichlet weights carrying the boundary variation) and, for unit
    flux, flows from boundary vertices into one interior vertex.
    """
    while True:
        n = n_vertices or int(rng.integers(6, 13))
        graph = random_connected_graph(rng, n, int(rng.integers(n, 2 * n + 1)))
        nb = int(rng.integers(2, min(5, n - 2) + 1))
        boundary = set(rng.choice(n, size=nb, replace=False).tolist())
        interior = set(graph.vertices) - boundary
        nxg = nx.Graph(list(graph.edges.values()))
        nxg.add_nodes_from(graph.vertices)
        if nx.is_connected(nxg.subgraph(interior)):
            break

    values = {e: 0.0 for e in graph.edges}
    interior_list = sorted(interior)

    for _ in range(dipoles if dipoles is not None else int(rng.integers(1, 4))):
        x, y = (int(v) for v in rng.choice(interior_list, size=2, replace=False))
        _add_path(values, graph, nx.shortest_path(nxg.subgraph(interior), x, y), float(rng.choice([-1.0, 1.0])))

    cycles = nx.cycle_basis(nxg.subgraph(interior))
    for cycle in cycles[: int(rng.integers(0, 3))]:
        _add_path(values, graph, cycle + cycle[:1], float(rng.uniform(-0.7, 0.7)))

    tv = float(rng.uniform(*tv_range))
    boundary_list = sorted(boundary)
    if flux != 0:
        x0 = int(rng.choice(interior_list))
        sources = rng.choice(boundary_list, size=int(rng.integers(1, len(boundary_list) + 1)), replace=False)
        weights = rng.dirichlet(np.ones(len(sources)))
        for b, w in zip(sources, weights):
            path = _path_avoiding(nxg, int(b), x0, interior)
            if path is not None:
                _add_path(values, graph, path, float(w))
            else:
                return charged_instance(rng, flux, tv_range, n_vertices, dipoles)
        tv -= 1.0

    if tv > 0 and len(boundary_list) >= 2:
        pairs = int(rng.integers(1, 4))
        weights = rng.dirichlet(np.ones(pairs)) * tv / 2
        for w in weights:
            b1, b2 = (int(v) for v in rng.choice(boundary_list, size=2, replace=False))
            path = _path_avoiding(nxg, b1, b2, interior)
            if path is None:
                path = nx.shortest_path(nxg, b1, b2)
                if any(v in boundary for v in path[1:-1]):
                    continue
            _add_path(values, graph, path, float(w))

    alpha = OneForm(graph, values)
    if flux < 0:
        alpha = -alpha
    return ChargedGraph(graph, frozenset(boundary), alpha)


def boundary_increments(
    rng: np.random.Generator, count: int, flux: int = 0, tv: Optional[float] = None
) -> np.ndarray:
    """
    Projected boundary increments for (h1) (flux 0, variation ``tv`` ≤ 1) or
    (h2) (flux ±1, all increments of one sign and below 1/2).
    """
    if flux == 0:
        x = rng.uniform(-1, 1, size=count)
        x -= x.mean()
        total = np.abs(x).sum()
        target = rng.uniform(0, 1) if tv is None else tv
        return x * (target / total) if total > 0 else x
    while True:
        w = rng.dirichlet(np.ones(count))
        if w.max() < 0.5:
            return w * flux


def boundary_values(c: PlanarComplex, increments: np.ndarray, start: float = 0.0) -> Dict[int, float]:
    """Integrate increments along E∂; the closing edge absorbs the total"""
    arcs = boundary_complex(c).edges
    values = {arcs[0].tail: start}
    current = start
    for arc, step in zip(arcs[:-1], increments[:-1]):
        current += float(step)
        values.setdefault(arc.head, current)
    return values


def pipeline_instance(
    rng: np.random.Generator, flux: int = 0, max_faces: int = 30
) -> Tuple[PlanarComplex, VertexFunction]:
    """Admissible complex with a boundary datum satisfying (h0) and (h1) or (h2), random interior"""
    c = random_admissible_complex(rng, max_faces)
    arcs = boundary_complex(c).edges
    steps = boundary_increments(rng, len(arcs), flux)
    values = boundary_values(c, steps, float(rng.uniform(0, 1)))
    for v in c.vertices:
        values.setdefault(v, float(rng.uniform(0, 1)))
    return c, VertexFunction(values)


def random_profile(rng: np.random.Generator, knots: int = 16) -> EnergyProfile:
    """Random nondecreasing piecewise-linear profile with f(0) = 0"""
    t = np.linspace(0.0, 0.5, knots)
    f = np.concatenate(([0.0], np.cumsum(rng.exponential(size=knots - 1))))
    return EnergyProfile.from_samples(t, f, name="random")


def hypothesis_counterexample(which: int, epsilon: float = 0.1) -> ChargedGraph:
    """
    The three tree counterexamples showing the removal bounds are sharp.

    1. a - A - B - b with α(a,A) = α(B,b) = 1/2 + ε and α(A,B) = -(1/2 - ε).
    2. a_i - A_i - B - b (i = 1, 2) with α(a_i,A_i) = 1/2 + ε,
       α(A_i,B) = -1/2 + ε and α(B,b) = 2ε.
    3. a_i - A_i - B (i = 1, 2, 3) with α(a_i,A_i) = 2/3 and α(B,A_i) = 1/3.
    """
    if which == 1:
        a, A, B, b = range(4)
        graph = Graph.from_pairs(range(4), [(a, A), (A, B), (B, b)])
        alpha = OneForm(graph, {0: 0.5 + epsilon, 1: -(0.5 - epsilon), 2: 0.5 + epsilon})
        return ChargedGraph(graph, frozenset({a, b}), alpha)
    if which == 2:
        a1, A1, a2, A2, B, b = range(6)
        graph = Graph.from_pairs(range(6), [(a1, A1), (A1, B), (a2, A2), (A2, B), (B, b)])
        alpha = OneForm(
            graph, {0: 0.5 + epsilon, 1: -0.5 + epsilon, 2: 0.5 + epsilon, 3: -0.5 + epsilon, 4: 2 * epsilon}
        )
        return ChargedGraph(graph, frozenset({a1, a2, b}), alpha)
    if which == 3:
        a1, A1, a2, A2, a3, A3, B = range(7)
        graph = Graph.from_pairs(range(7), [(a1, A1), (B, A1), (a2, A2), (B, A2), (a3, A3), (B, A3)])
        alpha = OneForm(graph, {e: (2 / 3 if e % 2 == 0 else 1 / 3) for e in range(6)})
        return ChargedGraph(graph, frozenset({a1, a2, a3}), alpha)
    raise ValueError(f"No counterexample {which}")
