"""The full decoding chain on one circuit, with exact per-stage checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .circuit import Circuit, eval_circuit
from .graph import eval_decoding, smoothness
from .pcpp import honest_proof, pcpp_to_udpcp, toy_pcpp
from .transforms import (
    DEFAULT_EXPANDER_DEGREE,
    Stage,
    embed_decoding,
    minimal_m,
    udpcp_to_vertex_decoding_graph,
)


@dataclass
class StageReport:
    name: str
    err: Fraction
    reject: Fraction
    vertices: int
    size: int
    smoothness: Fraction | None
    regular_degree: int | None
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.err == 0 and self.reject == 0 and all(self.checks.values())

    def row(self) -> dict:
        return {
            "stage": self.name,
            "err": str(self.err),
            "reject": str(self.reject),
            "vertices": self.vertices,
            "size": self.size,
            "smoothness": "" if self.smoothness is None else str(self.smoothness),
            "regular_degree": "" if self.regular_degree is None else self.regular_degree,
            "checks_passed": all(self.checks.values()),
            "failed_checks": ";".join(k for k, v in self.checks.items() if not v),
        }


@dataclass
class PipelineResult:
    phi: Circuit
    x: tuple
    Lambda_size: int
    m: int
    stages: list
    reports: list

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.reports)


def _report(st: Stage, pi, x, checks: dict) -> StageReport:
    G = st.graph
    err, rej = eval_decoding(G, pi, x)
    return StageReport(st.name, err, rej, len(G.vertices), len(G.edges), smoothness(G), G.regular_degree(), checks)


def run_pipeline(
    phi: Circuit,
    x,
    Lambda_size: int = 16,
    m: int | None = None,
    expander_degree: int = DEFAULT_EXPANDER_DEGREE,
) -> PipelineResult:
    """toy PCPP -> decoder -> vertex-decoding graph -> reduce -> pad -> de Bruijn.

    ``x`` must satisfy φ; every stage is evaluated exactly on its honest lift.
    With ``m=None`` the smallest m meeting the embedding precondition is used.
    """
    x = tuple(tuple(s) for s in x)
    if not eval_circuit(phi, x):
        raise ValueError("x does not satisfy the circuit")
    d0 = expander_degree
    V = toy_pcpp(phi)
    D = pcpp_to_udpcp(V, phi.u)
    proof = honest_proof(V, x)
    d_err, d_rej = D.stats(proof, x)
    reports = [
        StageReport(
            "udpcp", d_err, d_rej, 0, 0, None, None,
            {"query_complexity": D.q == V.q + phi.u, "proof_length": D.ell == V.n + V.ell, "rho": D.rho == V.rho / phi.u},
        )
    ]
    vd = udpcp_to_vertex_decoding_graph(D, d0)
    pi0 = vd.lift(proof)
    G0 = vd.graph
    reports.append(
        _report(vd, pi0, x, {
            "vertex_count": len(G0.vertices) == D.t * 2**D.r,
            "smoothness_one": smoothness(G0) == 1,
            "regular": G0.regular_degree() == D.q * d0,
            "valid": not G0.validate(),
        })
    )
    if m is None:
        m = minimal_m(G0, Lambda_size, d0)
    final, (reduced, padded) = embed_decoding(G0, Lambda_size, m, d0)
    pi1 = reduced.lift(pi0)
    Gr = reduced.graph
    reports.append(
        _report(reduced, pi1, x, {
            "regular": Gr.regular_degree() == 2 * d0,
            "smoothness_one": smoothness(Gr) == 1,
            "vertex_bound": len(Gr.vertices) <= reduced.params["vertex_bound"],
            "size_bound": len(Gr.edges) <= reduced.params["size_bound"],
            "valid": not Gr.validate(),
        })
    )
    pi2 = padded.lift(pi1)
    Gp = padded.graph
    reports.append(
        _report(padded, pi2, x, {
            "exact_vertices": len(Gp.vertices) == Lambda_size**m,
            "size_bound": len(Gp.edges) <= padded.params["size_bound"],
            "regular": Gp.regular_degree() == 4 * d0 * d0,
            "smoothness_half": smoothness(Gp) >= padded.params["smoothness_bound"],
            "valid": not Gp.validate(),
        })
    )
    pi3 = final.lift(pi2)
    Ge = final.graph
    reports.append(
        _report(final, pi3, x, {
            "size": len(Ge.edges) == Lambda_size ** (m + 1),
            "smoothness_bound": smoothness(Ge) >= final.params["smoothness_bound"],
            "valid": not Ge.validate(),
        })
    )
    return PipelineResult(phi, x, Lambda_size, m, [vd, reduced, padded, final], reports)
