"""
Square-lattice discretizations of planar domains and the discrete energies
defined on them.

A cell ``i + εQ`` (``i`` in εZ², ``Q`` the closed unit square) belongs to
the discretization when it lies inside the closed domain. Cell membership is
decided in exact rational arithmetic, so lattice points on the domain
boundary are never misclassified.
"""

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from base_solver import BaseSolver
from exceptions import (
    EmptyDiscretization,
    H0Unsatisfiable,
    InternalConsistencyError,
    MalformedInput,
    NotStarShaped,
)
from forms import HypothesisReport, VertexFunction, check_hypotheses, curl, differential, project_pi, project_pi_array
from graph import Arc
from logger import get_logger
from planar_complex import PlanarComplex, boundary_complex, complex_from_cells
from settings import Settings

log = get_logger("lattice")

LatticePoint = Tuple[int, int]
RationalPoint = Tuple[Fraction, Fraction]


def _rational(x: Union[int, float, Fraction, str]) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class Polygon:
    """Simple polygon given by its corners in either orientation"""
    corners: Tuple[RationalPoint, ...]

    def __post_init__(self):
        pts = tuple((_rational(x), _rational(y)) for x, y in self.corners)
        if len(pts) < 3:
            raise MalformedInput("A polygon needs at least three corners")
        object.__setattr__(self, "corners", pts)

    @classmethod
    def square(cls, half_width: Union[float, Fraction] = 1) -> "Polygon":
        h = _rational(half_width)
        return cls(((-h, -h), (h, -h), (h, h), (-h, h)))

    @classmethod
    def rectangle(cls, x0, y0, x1, y1) -> "Polygon":
        return cls(((x0, y0), (x1, y0), (x1, y1), (x0, y1)))

    @property
    def segments(self) -> List[Tuple[RationalPoint, RationalPoint]]:
        pts = self.corners
        return [(pts[k], pts[(k + 1) % len(pts)]) for k in range(len(pts))]

    def bounds(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        xs = [x for x, _ in self.corners]
        ys = [y for _, y in self.corners]
        return min(xs), min(ys), max(xs), max(ys)

    def contains(self, p: RationalPoint) -> bool:
        """Closed membership"""
        px, py = p
        inside = False
        for (x0, y0), (x1, y1) in self.segments:
            if _on_segment((x0, y0), (x1, y1), p):
                return True
            if (y0 > py) != (y1 > py):
                x_cross = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
                if px < x_cross:
                    inside = not inside
        return inside

    def contains_cell(self, lo: RationalPoint, size: Fraction) -> bool:
        x0, y0 = lo
        x1, y1 = x0 + size, y0 + size
        corners = ((x0, y0), (x1, y0), (x1, y1), (x0, y1))
        if not all(self.contains(c) for c in corners):
            return False
        if any(_crosses_open_box(a, b, (x0, y0, x1, y1)) for a, b in self.segments):
            return False
        return self.contains((x0 + size / 2, y0 + size / 2))

    def to_dict(self) -> Dict:
        return {"polygon": [[float(x), float(y)] for x, y in self.corners]}


@dataclass(frozen=True)
class Disk:
    center: RationalPoint = (Fraction(0), Fraction(0))
    radius: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "center", (_rational(self.center[0]), _rational(self.center[1])))
        object.__setattr__(self, "radius", _rational(self.radius))
        if self.radius <= 0:
            raise MalformedInput("Disk radius must be positive")

    def bounds(self) -> Tuple[Fraction, Fraction, Fraction, Fraction]:
        cx, cy = self.center
        r = self.radius
        return cx - r, cy - r, cx + r, cy + r

    def contains(self, p: RationalPoint) -> bool:
        dx, dy = p[0] - self.center[0], p[1] - self.center[1]
        return dx * dx + dy * dy <= self.radius * self.radius

    def contains_cell(self, lo: RationalPoint, size: Fraction) -> bool:
        x0, y0 = lo
        return all(self.contains((x0 + a, y0 + b)) for a in (0, size) for b in (0, size))

    def to_dict(self) -> Dict:
        return {"disk": {"center": [float(c) for c in self.center], "radius": float(self.radius)}}


Domain = Union[Polygon, Disk]


def _on_segment(a: RationalPoint, b: RationalPoint, p: RationalPoint) -> bool:
    cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
    if cross != 0:
        return False
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def _crosses_open_box(a: RationalPoint, b: RationalPoint, box: Tuple[Fraction, ...]) -> bool:
    """Whether segment ab meets the open box (x0, x1) × (y0, y1)"""
    x0, y0, x1, y1 = box
    lo, hi = None, None
    for p, d, low, high in ((a[0], b[0] - a[0], x0, x1), (a[1], b[1] - a[1], y0, y1)):
        if d == 0:
            if not low < p < high:
                return False
            continue
        t1, t2 = (low - p) / d, (high - p) / d
        if t1 > t2:
            t1, t2 = t2, t1
        lo = t1 if lo is None else max(lo, t1)
        hi = t2 if hi is None else min(hi, t2)
    if lo is None:
        return True
    return lo < hi and lo < 1 and hi > 0


def domain_from_spec(spec: str) -> Domain:
    """
    Parse ``square:h`` or ``square:x0,x1,y0,y1``, ``disk:r`` or ``disk:cx,cy,r``
    and ``polygon:x,y;x,y;...``. Numbers are read as exact decimals.
    """
    kind, _, arg = spec.partition(":")
    try:
        if kind == "square":
            values = [Fraction(v) for v in arg.split(",")] if arg else [Fraction(1)]
            if len(values) == 1:
                return Polygon.square(values[0])
            x0, x1, y0, y1 = values
            return Polygon.rectangle(x0, y0, x1, y1)
        if kind == "disk":
            values = [Fraction(v) for v in arg.split(",")] if arg else [Fraction(1)]
            if len(values) == 1:
                return Disk(radius=values[0])
            cx, cy, r = values
            return Disk(center=(cx, cy), radius=r)
        if kind == "polygon":
            return Polygon(tuple(tuple(Fraction(v) for v in pair.split(",")) for pair in arg.split(";") if pair))
    except (ValueError, ZeroDivisionError) as e:
        raise MalformedInput(f"Invalid domain '{spec}': {e}") from e
    raise MalformedInput(f"Unknown domain kind '{kind}'")


@dataclass(frozen=True, eq=False)
class LatticeDomain:
    """Cells, lattice points and bonds of a domain discretized at spacing ε"""
    epsilon: float
    cells: Tuple[LatticePoint, ...]
    points: Tuple[LatticePoint, ...]
    complex: PlanarComplex
    start: Optional[LatticePoint] = None

    @classmethod
    def from_cells(
        cls, epsilon: Union[float, Fraction], cells: Iterable[LatticePoint], start: Optional[LatticePoint] = None
    ) -> "LatticeDomain":
        cells = tuple(sorted({(int(ix), int(iy)) for ix, iy in cells}))
        if not cells:
            raise EmptyDiscretization("No lattice cell fits inside the domain")
        eps = float(epsilon)
        points = sorted({(ix + a, iy + b) for ix, iy in cells for a in (0, 1) for b in (0, 1)})
        index = {p: k for k, p in enumerate(points)}
        bonds = []
        for (ix, iy), k in index.items():
            for nbr in ((ix + 1, iy), (ix, iy + 1)):
                if nbr in index:
                    bonds.append((k, index[nbr]))
        coords = {k: (ix * eps, iy * eps) for (ix, iy), k in index.items()}
        c = complex_from_cells(coords, bonds)
        return cls(epsilon=eps, cells=cells, points=tuple(points), complex=c, start=start)

    @cached_property
    def index(self) -> Dict[LatticePoint, int]:
        return {p: k for k, p in enumerate(self.points)}

    def vertex_at(self, ix: int, iy: int) -> int:
        try:
            return self.index[(ix, iy)]
        except KeyError:
            raise MalformedInput(f"Lattice point ({ix}, {iy}) is not in the discretization") from None

    @property
    def num_vertices(self) -> int:
        return len(self.points)

    @cached_property
    def boundary_cycle(self) -> Tuple[Arc, ...]:
        """Counterclockwise boundary bonds starting at the smallest boundary point"""
        arcs = list(boundary_complex(self.complex).edges)
        if not arcs:
            return ()
        first = self.index.get(self.start) if self.start is not None else None
        if first is None or all(a.tail != first for a in arcs):
            first = min((a.tail for a in arcs), key=lambda v: self.points[v])
        k = next(i for i, a in enumerate(arcs) if a.tail == first)
        return tuple(arcs[k:] + arcs[:k])

    @cached_property
    def boundary_vertices(self) -> Tuple[int, ...]:
        """i0, ..., in in boundary order (repeats dropped)"""
        seen, out = set(), []
        for arc in self.boundary_cycle:
            if arc.tail not in seen:
                seen.add(arc.tail)
                out.append(arc.tail)
        return tuple(out)

    @cached_property
    def interior_vertices(self) -> Tuple[int, ...]:
        boundary = set(self.boundary_vertices)
        return tuple(v for v in range(self.num_vertices) if v not in boundary)

    @cached_property
    def bond_array(self) -> np.ndarray:
        """(|bonds|, 2) array of canonical bond endpoints in edge-id order"""
        edges = self.complex.graph.edges
        return np.array([edges[e] for e in sorted(edges)], dtype=np.int64).reshape(-1, 2)

    @cached_property
    def neighbors(self) -> Dict[int, np.ndarray]:
        g = self.complex.graph
        return {v: np.array(g.neighbors(v), dtype=np.int64) for v in g.vertices}

    def coordinates(self, v: int) -> Tuple[float, float]:
        return self.complex.coords[v]

    def rectangle_cycle(self, lo: LatticePoint, hi: LatticePoint) -> List[Arc]:
        """Counterclockwise bond cycle around the lattice rectangle [lo, hi]"""
        (x0, y0), (x1, y1) = lo, hi
        if x1 <= x0 or y1 <= y0:
            raise MalformedInput("Rectangle must have positive width and height")
        path = (
            [(x, y0) for x in range(x0, x1)]
            + [(x1, y) for y in range(y0, y1)]
            + [(x, y1) for x in range(x1, x0, -1)]
            + [(x0, y) for y in range(y1, y0, -1)]
        )
        ids = [self.vertex_at(*p) for p in path]
        g = self.complex.graph
        try:
            return [g.find_arc(a, b) for a, b in zip(ids, ids[1:] + ids[:1])]
        except KeyError as e:
            raise MalformedInput(f"Rectangle leaves the lattice: {e}") from None

    def to_dict(self) -> Dict:
        data = self.complex.to_dict()
        data["epsilon"] = self.epsilon
        data["cells"] = [[ix, iy] for ix, iy in self.cells]
        data["boundary_cycle"] = [[a.tail, a.head] for a in self.boundary_cycle]
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "LatticeDomain":
        try:
            return cls.from_cells(float(data["epsilon"]), [tuple(c) for c in data["cells"]])
        except (KeyError, TypeError, ValueError) as e:
            raise MalformedInput(f"Invalid lattice document: {e}") from e


def discretize(domain: Domain, epsilon: Union[float, Fraction], start: Optional[LatticePoint] = None) -> LatticeDomain:
    """
    Discretize a domain on the square lattice of spacing ε.

    Raises:
        MalformedInput: If ε is not positive.
        EmptyDiscretization: If no cell fits inside the closed domain.
    """
    eps = _rational(epsilon)
    if eps <= 0:
        raise MalformedInput(f"Lattice spacing must be positive, got {epsilon}")
    x_min, y_min, x_max, y_max = domain.bounds()
    cells = [
        (ix, iy)
        for ix in range(math.floor(x_min / eps), math.ceil(x_max / eps))
        for iy in range(math.floor(y_min / eps), math.ceil(y_max / eps))
        if domain.contains_cell((ix * eps, iy * eps), eps)
    ]
    if not cells:
        raise EmptyDiscretization(f"No cell of size {float(eps)} fits inside the domain")
    lattice = LatticeDomain.from_cells(eps, cells, start)
    log.info(
        f"Discretized domain at ε={float(eps)}: {len(lattice.cells)} cells, "
        f"{lattice.num_vertices} points, {len(lattice.boundary_cycle)} boundary bonds"
    )
    return lattice


@dataclass(frozen=True, eq=False)
class EnergyProfile:
    """Nondecreasing f on [0, 1/2]; the bond energy is f(|π(du)|)"""
    name: str
    f: Callable[[np.ndarray], np.ndarray]
    samples: int = 1000

    def __post_init__(self):
        t = np.linspace(0.0, 0.5, self.samples)
        values = np.asarray(self.f(t), dtype=float)
        if np.any(np.diff(values) < -1e-12):
            raise MalformedInput(f"Energy profile '{self.name}' is not nondecreasing on [0, 1/2]")

    def __call__(self, t: np.ndarray) -> np.ndarray:
        return np.asarray(self.f(np.asarray(t, dtype=float)), dtype=float)

    @classmethod
    def sd(cls) -> "EnergyProfile":
        return cls("sd", lambda t: t * t)

    @classmethod
    def xy(cls) -> "EnergyProfile":
        return cls("xy", lambda t: 1.0 - np.cos(2.0 * np.pi * t))

    @classmethod
    def from_samples(cls, t: Sequence[float], values: Sequence[float], name: str = "custom") -> "EnergyProfile":
        t = np.asarray(t, dtype=float)
        values = np.asarray(values, dtype=float)
        if t.ndim != 1 or t.shape != values.shape or len(t) < 2 or np.any(np.diff(t) <= 0):
            raise MalformedInput("Profile samples need increasing abscissae and matching values")
        return cls(name, lambda x: np.interp(x, t, values))

    @classmethod
    def from_file(cls, path: str) -> "EnergyProfile":
        """Samples table from JSON ``{"t": [...], "f": [...]}`` or a CSV with columns t, f"""
        p = Path(path)
        try:
            if p.suffix.lower() == ".csv":
                frame = pd.read_csv(p)
                return cls.from_samples(frame["t"].to_numpy(), frame["f"].to_numpy(), p.stem)
            with open(p, "r") as f:
                data = json.load(f)
            return cls.from_samples(data["t"], data["f"], p.stem)
        except (OSError, KeyError, ValueError) as e:
            raise MalformedInput(f"Could not read energy profile {path}: {e}") from e


def profile_from_spec(spec: str) -> EnergyProfile:
    """``sd``, ``xy`` or ``custom:<file>``"""
    if spec == "sd":
        return EnergyProfile.sd()
    if spec == "xy":
        return EnergyProfile.xy()
    if spec.startswith("custom:"):
        return EnergyProfile.from_file(spec.split(":", 1)[1])
    raise MalformedInput(f"Unknown energy profile '{spec}'")


def bond_increments(u: VertexFunction, lattice: LatticeDomain) -> np.ndarray:
    """π(du) on every bond, canonical orientation"""
    values = u.as_array(range(lattice.num_vertices))
    bonds = lattice.bond_array
    return project_pi_array(values[bonds[:, 1]] - values[bonds[:, 0]])


def energy(u: VertexFunction, lattice: LatticeDomain, profile: EnergyProfile) -> float:
    """Σ f(|π(du)|) over unordered bonds, each counted once"""
    return float(np.sum(profile(np.abs(bond_increments(u, lattice)))))


def bond_energies(u: VertexFunction, lattice: LatticeDomain, profile: EnergyProfile) -> np.ndarray:
    return profile(np.abs(bond_increments(u, lattice)))


@dataclass(frozen=True)
class VorticityMeasure:
    """Integer charge per face, located at the face centre"""
    by_face: Dict[int, int]
    centers: Dict[int, Tuple[float, float]]

    @property
    def total(self) -> int:
        return sum(self.by_face.values())

    @property
    def charges(self) -> Dict[Tuple[float, float], int]:
        return {self.centers[f]: k for f, k in self.by_face.items() if k != 0}

    def support(self) -> List[int]:
        return sorted(f for f, k in self.by_face.items() if k != 0)

    def to_frame(self) -> pd.DataFrame:
        rows = [
            {"face": f, "x": self.centers[f][0], "y": self.centers[f][1], "charge": k}
            for f, k in sorted(self.by_face.items())
            if k != 0
        ]
        return pd.DataFrame(rows, columns=["face", "x", "y", "charge"])


def vorticity(u: VertexFunction, lattice: LatticeDomain, tolerance: float = 1e-9) -> VorticityMeasure:
    """
    Circulation of π(du) around every face.

    Raises:
        InternalConsistencyError: If a unit cell carries a charge outside
            {-1, 0, 1} or a non-integral circulation.
    """
    c = lattice.complex
    alpha = differential(u, c.graph).projected()
    circulation_by_face = curl(alpha, c)
    by_face = {}
    for fid, x in circulation_by_face.values.items():
        k = round(x)
        if abs(x - k) > tolerance:
            raise InternalConsistencyError(f"Face {fid} has non-integral circulation {x!r}")
        if len(c.faces[fid]) == 4 and abs(k) > 1:
            raise InternalConsistencyError(f"Cell {fid} carries charge {k}")
        by_face[fid] = int(k)
    centers = {fid: c.face_interior_point(fid) for fid in range(c.num_faces)}
    return VorticityMeasure(by_face=by_face, centers=centers)


def circulation(u: VertexFunction, cycle: Sequence[Arc]) -> float:
    """Σ π(du) along a closed bond path"""
    return math.fsum(project_pi(u[a.head] - u[a.tail]) for a in cycle)


def enclosed_charge(u: VertexFunction, lattice: LatticeDomain, lo: LatticePoint, hi: LatticePoint) -> int:
    """Total vorticity of the faces inside the lattice rectangle [lo, hi]"""
    eps = lattice.epsilon
    measure = vorticity(u, lattice)
    x0, y0, x1, y1 = lo[0] * eps, lo[1] * eps, hi[0] * eps, hi[1] * eps
    return sum(
        k for f, k in measure.by_face.items()
        if x0 < measure.centers[f][0] < x1 and y0 < measure.centers[f][1] < y1
    )


def lattice_hypotheses(u0: VertexFunction, lattice: LatticeDomain, tolerance: float = 1e-9) -> HypothesisReport:
    """(H0)-(H2) for a boundary datum; interior values are not consulted"""
    full = VertexFunction({v: u0.values.get(v, 0.0) for v in range(lattice.num_vertices)})
    return check_hypotheses(full, lattice.complex, tolerance)


def boundary_variation(u0: VertexFunction, lattice: LatticeDomain) -> float:
    """Σ |π(du0)| over the counterclockwise boundary bonds"""
    return math.fsum(abs(project_pi(u0[a.head] - u0[a.tail])) for a in lattice.boundary_cycle)


def constant_boundary(lattice: LatticeDomain, value: float = 0.0) -> VertexFunction:
    return VertexFunction({v: value for v in lattice.boundary_vertices})


def lift_boundary(
    v0: Union[Callable[[float, float], complex], Mapping[int, complex]],
    lattice: LatticeDomain,
    modulus: Optional[Callable[[float], float]] = None,
) -> VertexFunction:
    """
    Phase u0 with v0 = exp(2πi u0) on the boundary points.

    The phase is unwrapped along the boundary cycle: each step adds the
    projected phase difference, so u0 is continuous everywhere except across
    the closing bond.

    Args:
        v0: Unit-modulus datum, as a function of position or per boundary vertex.
        lattice: Discretized domain.
        modulus: Modulus of continuity of v0; checked at the lattice spacing.

    Raises:
        H0Unsatisfiable: If ω(ε) exceeds 1/(2√2).
        MalformedInput: If the datum vanishes at a boundary point.
    """
    if modulus is not None:
        w = modulus(lattice.epsilon)
        if math.sqrt(2.0) * w > 0.5:
            raise H0Unsatisfiable(
                f"Lattice spacing {lattice.epsilon} is too coarse: ω(ε) = {w:.4g} exceeds 1/(2√2)"
            )

    def value(v: int) -> complex:
        z = v0[v] if isinstance(v0, Mapping) else v0(*lattice.coordinates(v))
        z = complex(z)
        if abs(z) == 0:
            raise MalformedInput(f"Boundary datum vanishes at vertex {v}")
        return z

    order = lattice.boundary_vertices
    phases = {v: math.atan2(value(v).imag, value(v).real) / (2 * math.pi) for v in order}
    u0 = {order[0]: phases[order[0]] % 1.0}
    for prev, cur in zip(order, order[1:]):
        u0[cur] = u0[prev] + project_pi(phases[cur] - phases[prev])
    return VertexFunction(u0)


def star_boundary(
    psi: Callable[[float], float],
    lattice: LatticeDomain,
    rays: int = 1000,
    check_star: bool = True,
) -> VertexFunction:
    """
    u0(i) = ψ(θ(i) / 2π) with θ the polar angle in [0, 2π).

    Raises:
        NotStarShaped: If the discretized domain is not star-shaped about 0.
    """
    if check_star:
        check_star_shaped(lattice, rays)
    u0 = {}
    for v in lattice.boundary_vertices:
        x, y = lattice.coordinates(v)
        if x == 0 and y == 0:
            raise NotStarShaped("The origin lies on the discrete boundary")
        theta = math.atan2(y, x) % (2 * math.pi)
        u0[v] = float(psi(theta / (2 * math.pi)))
    return VertexFunction(u0)


def check_star_shaped(lattice: LatticeDomain, rays: int = 1000) -> None:
    """Sample rays from the origin; each must leave the union of cells once and for all"""
    eps = lattice.epsilon
    cells = np.array(lattice.cells, dtype=np.int64)
    lo = cells.min(axis=0)
    grid = np.zeros(tuple(cells.max(axis=0) - lo + 1), dtype=bool)
    grid[cells[:, 0] - lo[0], cells[:, 1] - lo[1]] = True

    reach = max(math.hypot(*lattice.coordinates(v)) for v in range(lattice.num_vertices)) + eps
    step = eps / 8
    radii = (np.arange(math.ceil(reach / step)) + 0.5) * step
    angles = 2 * np.pi * (np.arange(rays) + 0.5) / rays
    ix = np.floor(np.outer(np.cos(angles), radii) / eps).astype(np.int64) - lo[0]
    iy = np.floor(np.outer(np.sin(angles), radii) / eps).astype(np.int64) - lo[1]
    valid = (ix >= 0) & (iy >= 0) & (ix < grid.shape[0]) & (iy < grid.shape[1])
    inside = np.zeros_like(valid)
    inside[valid] = grid[ix[valid], iy[valid]]

    if not inside[:, 0].all():
        raise NotStarShaped("The origin is not inside the discretized domain")
    reentry = np.diff(inside.astype(np.int8), axis=1) > 0
    if reentry.any():
        k = int(np.argmax(reentry.any(axis=1)))
        raise NotStarShaped(f"Ray at angle {float(angles[k]):.4f} re-enters the discretized domain")


class Relaxer(BaseSolver):
    """Coordinate descent on interior values with the boundary held fixed"""

    def __init__(self, settings: Optional[Settings] = None):
        super().__init__(settings)
        self.grid = self.settings.lattice.relax_grid
        self.history: List[float] = []

    def solve(
        self,
        u: VertexFunction,
        lattice: LatticeDomain,
        profile: EnergyProfile,
        sweeps: Optional[int] = None,
    ) -> VertexFunction:
        """
        Run ``sweeps`` passes over the interior vertices in id order.

        Each vertex moves to the best of its current value, the grid k/grid,
        its neighbours' values and the XY mean phase, and only when that
        strictly lowers its local energy. Energy is therefore nonincreasing.
        """
        sweeps = self.settings.lattice.relax_sweeps if sweeps is None else sweeps
        values = u.as_array(range(lattice.num_vertices)).copy()
        grid = np.arange(self.grid) / self.grid
        self.history = [energy(u, lattice, profile)]

        for sweep in range(sweeps):
            moved = 0
            for v in lattice.interior_vertices:
                nbrs = values[lattice.neighbors[v]]
                phasor = np.exp(2j * np.pi * nbrs).sum()
                extra = [np.angle(phasor) / (2 * np.pi)] if abs(phasor) > 1e-12 else []
                candidates = np.concatenate(([values[v]], grid, nbrs, extra))
                local = profile(np.abs(project_pi_array(candidates[:, None] - nbrs[None, :]))).sum(axis=1)
                best = int(np.argmin(local))
                if local[best] < local[0] - 1e-15:
                    values[v] = candidates[best]
                    moved += 1
            current = VertexFunction(dict(enumerate(values.tolist())))
            self.history.append(energy(current, lattice, profile))
            self.log_debug(f"Sweep {sweep + 1}: energy {self.history[-1]:.10g}, {moved} vertex move(s)")
            if moved == 0:
                break
        return VertexFunction(dict(enumerate(values.tolist())))


def relax(
    u: VertexFunction,
    lattice: LatticeDomain,
    profile: EnergyProfile,
    sweeps: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> VertexFunction:
    return Relaxer(settings).solve(u, lattice, profile, sweeps)
