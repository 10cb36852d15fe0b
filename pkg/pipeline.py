"""
End-to-end dipole removal for a vertex function on a planar complex.

    α = π(du) → dual form → removal → pulled back α̃ → ũ

Under (h1) the corrected form is curl-free and ũ is its primitive. Under (h2)
one face keeps the boundary circulation and ũ is rebuilt around it.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from base_solver import BaseSolver
from dual import dual_hypotheses, dualize, pull_form, push_form
from exceptions import HypothesisViolated, InternalConsistencyError, MalformedInput
from forms import HypothesisReport, OneForm, VertexFunction, check_hypotheses, curl, differential
from lattice import EnergyProfile
from planar_complex import PlanarComplex, boundary_complex
from reconstruct import integrate_curl_free, reconstruct_with_singularity
from reductions import ChargedGraph
from removal import DipoleRemover, RemovalResult
from settings import Settings


@dataclass
class PipelineReport:
    """Everything a pipeline run certifies about its output"""
    hypotheses: HypothesisReport
    dual: Dict[str, float]
    certificate: Dict
    singular_face: Optional[int]
    max_ratio: float
    round_trip_error: float
    strict_edges: List[int] = field(default_factory=list)
    energies: Dict[str, Dict[str, float]] = field(default_factory=dict)
    vorticity_before: Dict[int, int] = field(default_factory=dict)
    vorticity_after: Dict[int, int] = field(default_factory=dict)

    @property
    def total_vorticity(self) -> int:
        return sum(self.vorticity_after.values())

    def energy_decreased(self, slack: float = 1e-9) -> bool:
        return all(e["after"] <= e["before"] + slack for e in self.energies.values())

    def to_dict(self) -> Dict:
        return {
            "hypotheses": self.hypotheses.to_dict(),
            "dual": self.dual,
            "certificate": self.certificate,
            "singular_face": self.singular_face,
            "max_ratio": self.max_ratio,
            "round_trip_error": self.round_trip_error,
            "strict_edges": self.strict_edges,
            "energies": self.energies,
            "vorticity_before": {str(f): k for f, k in sorted(self.vorticity_before.items()) if k},
            "vorticity_after": {str(f): k for f, k in sorted(self.vorticity_after.items()) if k},
        }


def face_charges(u: VertexFunction, c: PlanarComplex, tolerance: float = 1e-9) -> Dict[int, int]:
    """Integer curl of π(du) on every bounded face"""
    charge = curl(differential(u, c.graph).projected(), c)
    out = {}
    for fid, x in charge.values.items():
        k = round(x)
        if abs(x - k) > tolerance:
            raise InternalConsistencyError(f"Face {fid} has non-integral circulation {x!r}")
        out[fid] = int(k)
    return out


def complex_energy(u: VertexFunction, c: PlanarComplex, profile: EnergyProfile) -> float:
    """Σ f(|π(du)|) over the edges of the complex"""
    return float(np.sum(profile(np.abs(differential(u, c.graph).projected().as_array()))))


def edgewise_ratio(before: OneForm, after: OneForm, tolerance: float = 1e-12) -> Tuple[float, List[int]]:
    """(max |after| / |before|, edges where |after| < |before|)"""
    worst, strict = 0.0, []
    for e in sorted(before.values):
        a, b = abs(before.values[e]), abs(after.values[e])
        if a > tolerance:
            worst = max(worst, b / a)
        elif b > tolerance:
            worst = math.inf
        if b < a - tolerance:
            strict.append(e)
    return worst, strict


class DipolePipeline(BaseSolver):
    """Runs the dual removal on π(du) and rebuilds the vertex function"""

    def __init__(self, settings: Optional[Settings] = None, seed: Optional[int] = None):
        super().__init__(settings)
        self.remover = DipoleRemover(self.settings, seed=seed)

    def solve(
        self,
        c: PlanarComplex,
        u: VertexFunction,
        profiles: Sequence[EnergyProfile] = (),
    ) -> Tuple[VertexFunction, PipelineReport]:
        """
        Args:
            c: Admissible planar complex.
            u: Vertex function defined on every vertex of ``c``.
            profiles: Energy profiles compared before and after; SD and XY
                are always included.

        Returns:
            ũ and the report certifying it.

        Raises:
            MalformedInput: If ``u`` misses a vertex.
            NotAdmissible: If the complex is not admissible.
            HypothesisViolated: Naming the failed boundary clause.
        """
        tol = self.tolerance
        if not u.is_total_on(c.vertices):
            missing = sorted(v for v in c.vertices if v not in u)
            raise MalformedInput(f"Vertex function is missing {len(missing)} vertex value(s), e.g. {missing[:5]}")

        hypotheses = check_hypotheses(u, c, tol)
        clause = hypotheses.failing_clause()
        if clause is not None:
            self.log_warning(f"Boundary hypothesis {clause} fails: {hypotheses.to_dict()}")
            raise HypothesisViolated(
                f"Boundary sum {hypotheses.boundary_sum:.6g}, variation {hypotheses.boundary_tv:.6g}, "
                f"{len(hypotheses.exceptions)} edge(s) with π(du) ≠ du",
                clause,
            )

        alpha = differential(u, c.graph).projected()
        dual = dualize(c)
        beta = push_form(alpha, dual)
        dual_report = dual_hypotheses(beta, dual, tol)
        cg = ChargedGraph(dual.graph, dual.boundary, beta, tol)
        if hypotheses.h1_ok:
            result = self.remover.zero_flux(cg)
        else:
            result = self.remover.unit_flux(cg)
        corrected = pull_form(result.gamma, dual)

        u_tilde, singular = self._reconstruct(c, u, corrected, result, hypotheses)
        report = self._report(c, u, u_tilde, alpha, corrected, result, hypotheses, dual_report, singular, profiles)
        self.log_info(
            f"Pipeline ({result.method}): {sum(1 for k in report.vorticity_before.values() if k)} charged face(s) "
            f"→ {sum(1 for k in report.vorticity_after.values() if k)}, max ratio {report.max_ratio:.6g}"
        )
        return u_tilde, report

    def _reconstruct(
        self,
        c: PlanarComplex,
        u: VertexFunction,
        corrected: OneForm,
        result: RemovalResult,
        hypotheses: HypothesisReport,
    ) -> Tuple[VertexFunction, Optional[int]]:
        tol = self.tolerance
        arcs = boundary_complex(c).edges
        if hypotheses.h1_ok:
            v0 = arcs[0].tail
            u_tilde = integrate_curl_free(c, (v0, u[v0]), corrected, tol)
            singular = None
        else:
            e0 = hypotheses.e0 if hypotheses.e0 is not None else arcs[0]
            singular = result.x0
            u_tilde = reconstruct_with_singularity(c, u, corrected, singular, e0, tol)

        boundary = {a.tail for a in arcs}
        drift = max((abs(u_tilde[v] - u[v]) for v in boundary), default=0.0)
        if drift > tol:
            raise InternalConsistencyError(f"Reconstruction moved a boundary value by {drift:.3g}")
        return u_tilde.with_values({v: u[v] for v in boundary}), singular

    def _report(
        self,
        c: PlanarComplex,
        u: VertexFunction,
        u_tilde: VertexFunction,
        alpha: OneForm,
        corrected: OneForm,
        result: RemovalResult,
        hypotheses: HypothesisReport,
        dual_report: Dict[str, float],
        singular: Optional[int],
        profiles: Sequence[EnergyProfile],
    ) -> PipelineReport:
        tol = self.tolerance
        after = differential(u_tilde, c.graph).projected()
        ratio, strict = edgewise_ratio(alpha, after)
        before_charges = face_charges(u, c, tol)
        after_charges = face_charges(u_tilde, c, tol)

        expected = {f: 0 for f in after_charges}
        if singular is not None:
            expected[singular] = round(hypotheses.boundary_sum)
        if after_charges != expected:
            raise InternalConsistencyError(
                f"Output vorticity {dict((f, k) for f, k in after_charges.items() if k)} "
                f"differs from the promised {dict((f, k) for f, k in expected.items() if k)}"
            )

        energies = {}
        names = set()
        for profile in (EnergyProfile.sd(), EnergyProfile.xy(), *profiles):
            if profile.name in names:
                continue
            names.add(profile.name)
            energies[profile.name] = {
                "before": complex_energy(u, c, profile),
                "after": complex_energy(u_tilde, c, profile),
            }

        return PipelineReport(
            hypotheses=hypotheses,
            dual={"flux": dual_report["flux"], "tv": dual_report["tv"]},
            certificate=result.certificate(),
            singular_face=singular,
            max_ratio=ratio,
            round_trip_error=after.max_abs_difference(corrected),
            strict_edges=strict,
            energies=energies,
            vorticity_before=before_charges,
            vorticity_after=after_charges,
        )


def run(
    c: PlanarComplex,
    u: VertexFunction,
    settings: Optional[Settings] = None,
    profiles: Sequence[EnergyProfile] = (),
    seed: Optional[int] = None,
) -> Tuple[VertexFunction, PipelineReport]:
    """Apply the dipole-removal pipeline to ``u`` on ``c``"""
    return DipolePipeline(settings, seed=seed).solve(c, u, profiles)
