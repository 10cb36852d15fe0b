"""
Discrete 1-forms and vertex functions on graphs, the projection onto
[-1/2, 1/2], and the boundary hypotheses of the removal theorems.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np

from exceptions import IntegralityViolation, MalformedInput
from graph import Arc, Graph
from planar_complex import PlanarComplex, boundary_complex


def project_pi(y: float) -> float:
    """
    Representative of ``y`` modulo the integers in [-1/2, 1/2].

    Ties (``y`` in 1/2 + Z) resolve toward the integer closest to 0, so the
    result is +1/2 for positive ``y`` and -1/2 for negative ``y``.
    """
    z = math.floor(y)
    frac = y - z
    if frac > 0.5 or (frac == 0.5 and z < 0):
        z += 1
    return y - z


def project_pi_array(y: np.ndarray) -> np.ndarray:
    """Vectorized ``project_pi``"""
    y = np.asarray(y, dtype=float)
    z = np.floor(y)
    frac = y - z
    z = np.where((frac > 0.5) | ((frac == 0.5) & (z < 0)), z + 1, z)
    return y - z


@dataclass(frozen=True, eq=False)
class VertexFunction:
    """Real function on vertices"""
    values: Mapping[int, float]

    def __post_init__(self):
        object.__setattr__(self, "values", {int(v): float(x) for v, x in self.values.items()})

    def __getitem__(self, v: int) -> float:
        return self.values[v]

    def __contains__(self, v: int) -> bool:
        return v in self.values

    def __len__(self) -> int:
        return len(self.values)

    def items(self):
        return self.values.items()

    def is_total_on(self, vertices: Iterable[int]) -> bool:
        return all(v in self.values for v in vertices)

    def with_values(self, updates: Mapping[int, float]) -> "VertexFunction":
        merged = dict(self.values)
        merged.update(updates)
        return VertexFunction(merged)

    def restricted(self, vertices: Iterable[int]) -> "VertexFunction":
        return VertexFunction({v: self.values[v] for v in vertices})

    def as_array(self, order: Iterable[int]) -> np.ndarray:
        return np.array([self.values[v] for v in order], dtype=float)

    def to_dict(self) -> Dict:
        return {"values": [[v, x] for v, x in sorted(self.values.items())]}

    @classmethod
    def from_dict(cls, data: Dict) -> "VertexFunction":
        try:
            return cls({int(v): float(x) for v, x in data["values"]})
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedInput(f"Invalid vertex function document: {e}") from e


@dataclass(frozen=True, eq=False)
class OneForm:
    """
    Antisymmetric function on oriented edges.

    One value per edge id, read on the canonical orientation; the reverse
    orientation is the negation.
    """
    graph: Graph
    values: Mapping[int, float] = field(default_factory=dict)

    def __post_init__(self):
        vals = {int(e): float(x) for e, x in self.values.items()}
        if vals.keys() != self.graph.edges.keys():
            missing = set(self.graph.edges) - set(vals)
            extra = set(vals) - set(self.graph.edges)
            raise MalformedInput(f"Form domain mismatch (missing {sorted(missing)[:5]}, extra {sorted(extra)[:5]})")
        object.__setattr__(self, "values", vals)

    @classmethod
    def zeros(cls, graph: Graph) -> "OneForm":
        return cls(graph, {e: 0.0 for e in graph.edges})

    @classmethod
    def from_arcs(cls, graph: Graph, fn: Callable[[Arc], float]) -> "OneForm":
        return cls(graph, {e: fn(graph.arc(e, 1)) for e in graph.edges})

    @classmethod
    def from_pairs(cls, graph: Graph, pair_values: Mapping[Tuple[int, int], float]) -> "OneForm":
        """Values given on oriented vertex pairs (simple graphs only); unlisted edges are 0"""
        vals = {e: 0.0 for e in graph.edges}
        for (a, b), x in pair_values.items():
            arc = graph.find_arc(a, b)
            vals[arc.edge] = arc.sign * float(x)
        return cls(graph, vals)

    def __call__(self, arc: Arc) -> float:
        return arc.sign * self.values[arc.edge]

    def at(self, edge: int, sign: int = 1) -> float:
        return sign * self.values[edge]

    def along(self, u: int, v: int) -> float:
        return self(self.graph.find_arc(u, v))

    def _check_same(self, other: "OneForm") -> None:
        if other.graph is not self.graph and other.graph.edges != self.graph.edges:
            raise ValueError("Forms live on different graphs")

    def __add__(self, other: "OneForm") -> "OneForm":
        self._check_same(other)
        return OneForm(self.graph, {e: x + other.values[e] for e, x in self.values.items()})

    def __sub__(self, other: "OneForm") -> "OneForm":
        self._check_same(other)
        return OneForm(self.graph, {e: x - other.values[e] for e, x in self.values.items()})

    def __neg__(self) -> "OneForm":
        return OneForm(self.graph, {e: -x for e, x in self.values.items()})

    def __mul__(self, scalar: float) -> "OneForm":
        return OneForm(self.graph, {e: scalar * x for e, x in self.values.items()})

    __rmul__ = __mul__

    def magnitudes(self) -> Dict[int, float]:
        return {e: abs(x) for e, x in self.values.items()}

    def map(self, fn: Callable[[float], float]) -> "OneForm":
        """Apply an odd function valuewise (keeps antisymmetry)"""
        return OneForm(self.graph, {e: fn(x) for e, x in self.values.items()})

    def projected(self) -> "OneForm":
        return self.map(project_pi)

    def restricted(self, sub: Graph) -> "OneForm":
        """Same values on a subgraph sharing edge ids"""
        return OneForm(sub, {e: self.values[e] for e in sub.edges})

    def patched(self, other: "OneForm") -> "OneForm":
        """Values of ``other`` on its edges, own values elsewhere"""
        vals = dict(self.values)
        vals.update(other.values)
        return OneForm(self.graph, vals)

    def on_graph(self, graph: Graph) -> "OneForm":
        return OneForm(graph, self.values)

    def max_abs_difference(self, other: "OneForm") -> float:
        self._check_same(other)
        return max((abs(x - other.values[e]) for e, x in self.values.items()), default=0.0)

    def as_array(self) -> np.ndarray:
        return np.array([self.values[e] for e in sorted(self.values)], dtype=float)

    def to_dict(self) -> Dict:
        return {"edges": [[a, b, self.values[e]] for e, (a, b) in sorted(self.graph.edges.items())]}

    @classmethod
    def from_dict(cls, graph: Graph, data: Dict) -> "OneForm":
        """Read ``{"edges": [[a, b, value]]}`` listed in edge-id order"""
        try:
            rows = data["edges"]
            if len(rows) != graph.num_edges:
                raise ValueError(f"expected {graph.num_edges} rows, got {len(rows)}")
            vals = {}
            for (eid, (a, b)), (ra, rb, x) in zip(sorted(graph.edges.items()), rows):
                if (int(ra), int(rb)) == (a, b):
                    vals[eid] = float(x)
                elif (int(rb), int(ra)) == (a, b):
                    vals[eid] = -float(x)
                else:
                    raise ValueError(f"row ({ra}, {rb}) does not match edge {eid} = ({a}, {b})")
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedInput(f"Invalid form document: {e}") from e
        return cls(graph, vals)

    def __repr__(self) -> str:
        return f"OneForm({self.graph!r})"


@dataclass(frozen=True)
class FaceCharge:
    """Real value per bounded face"""
    values: Dict[int, float]

    def __getitem__(self, fid: int) -> float:
        return self.values[fid]

    def nonzero(self, tolerance: float = 1e-9) -> Dict[int, float]:
        return {f: x for f, x in self.values.items() if abs(x) > tolerance}

    def total(self) -> float:
        return math.fsum(self.values.values())


def differential(u: VertexFunction, graph: Graph) -> OneForm:
    """du(i, j) = u(j) - u(i)"""
    return OneForm(graph, {e: u[b] - u[a] for e, (a, b) in graph.edges.items()})


def curl(alpha: OneForm, c: PlanarComplex) -> FaceCharge:
    """Sum of the form along each face's counterclockwise cycle"""
    return FaceCharge({fid: math.fsum(alpha(arc) for arc in cycle) for fid, cycle in enumerate(c.faces)})


def divergence(gamma: OneForm, graph: Optional[Graph] = None) -> Dict[int, float]:
    """div(γ)(v) = Σ γ(v, v') over arcs leaving v"""
    g = graph if graph is not None else gamma.graph
    return {v: math.fsum(gamma(arc) for arc in g.arcs_from(v)) for v in g.vertices}


def flux(gamma: OneForm, boundary: Iterable[int]) -> float:
    div = divergence(gamma)
    return math.fsum(div[v] for v in boundary)


def boundary_tv(gamma: OneForm, boundary: Iterable[int]) -> float:
    g = gamma.graph
    return math.fsum(abs(gamma(arc)) for v in boundary for arc in g.arcs_from(v))


def snap_integral(values: Mapping[int, float], tolerance: float = 1e-9, what: str = "divergence") -> Dict[int, int]:
    """Round values to integers, rejecting any farther than ``tolerance`` from Z"""
    snapped = {}
    for key, x in values.items():
        k = round(x)
        if abs(x - k) > tolerance:
            raise IntegralityViolation(f"{what} at {key} is {x!r}, not an integer")
        snapped[key] = int(k)
    return snapped


@dataclass
class HypothesisReport:
    """Boundary hypotheses (h0)-(h2) for a vertex function on a complex"""
    h0_ok: bool
    e0: Optional[Arc]
    boundary_sum: float
    boundary_tv: float
    h1_ok: bool
    h1_strict: bool
    h2_ok: bool
    exceptions: List[Arc] = field(default_factory=list)

    @property
    def applicable(self) -> bool:
        return self.h0_ok and (self.h1_ok or self.h2_ok)

    def failing_clause(self) -> Optional[str]:
        if not self.h0_ok:
            return "h0"
        if not (self.h1_ok or self.h2_ok):
            return "h1/h2"
        return None

    def to_dict(self) -> Dict:
        return {
            "h0_ok": self.h0_ok,
            "e0": None if self.e0 is None else [self.e0.tail, self.e0.head],
            "boundary_sum": self.boundary_sum,
            "boundary_tv": self.boundary_tv,
            "h1_ok": self.h1_ok,
            "h1_strict": self.h1_strict,
            "h2_ok": self.h2_ok,
            "exceptions": [[a.tail, a.head] for a in self.exceptions],
        }


def evaluate_boundary(values: List[float], raw: List[float], arcs: List[Arc], tolerance: float) -> HypothesisReport:
    """Hypotheses from projected (``values``) and raw increments along a counterclockwise boundary cycle"""
    exceptions = [arc for arc, p, r in zip(arcs, values, raw) if abs(p - r) > tolerance]
    total = math.fsum(values)
    tv = math.fsum(abs(x) for x in values)
    h1 = abs(total) <= tolerance and tv <= 1 + tolerance
    return HypothesisReport(
        h0_ok=len(exceptions) <= 1,
        e0=exceptions[0] if exceptions else None,
        boundary_sum=total,
        boundary_tv=tv,
        h1_ok=h1,
        h1_strict=h1 and tv < 1 - tolerance,
        h2_ok=abs(abs(total) - 1) <= tolerance and abs(tv - 1) <= tolerance,
        exceptions=exceptions,
    )


def check_hypotheses(u: VertexFunction, c: PlanarComplex, tolerance: float = 1e-9) -> HypothesisReport:
    """Evaluate (h0), (h1) with strictness, and (h2) on the boundary complex"""
    du = differential(u, c.graph)
    arcs = list(boundary_complex(c).edges)
    raw = [du(arc) for arc in arcs]
    return evaluate_boundary([project_pi(x) for x in raw], raw, arcs, tolerance)
