"""One function per operation; both the HTTP routes and the CLI call these."""

from __future__ import annotations

import math

from .. import __version__
from ..constraints import ConstraintParams, build_graph
from ..errors import InvalidParams
from ..experiments import (
    ExperimentConfig,
    cost_concentration_experiment,
    dominance_experiment,
)
from ..measure import build_measure, sample_batch
from ..spectral import compute_spectral, left_eigvec_numeric, perron_eigenvalue, right_eigvec_closed_form
from ..strandio import decode_word, encode_word
from ..synthesis import cost_report, parse_reference, shortest_common_supersequence
from . import models as m


def capacity(req: m.CapacityRequest) -> m.CapacityResponse:
    params = ConstraintParams(req.r, req.k)
    lam = perron_eigenvalue(params, req.tol)
    return m.CapacityResponse(
        r=req.r,
        k=req.k,
        growth_rate=lam,
        capacity=math.log(lam) / math.log(req.r),
    )


def eigenvector(req: m.EigenvectorRequest) -> m.EigenvectorResponse:
    params = ConstraintParams(req.r, req.k)
    lam = perron_eigenvalue(params)
    phi = right_eigvec_closed_form(params, lam)
    xi = None
    if req.include_left:
        graph = build_graph(params)
        xi = [float(x) for x in left_eigvec_numeric(graph, lam, phi=phi)]
    return m.EigenvectorResponse(
        r=req.r, k=req.k, growth_rate=lam, phi=[float(x) for x in phi], xi=xi
    )


def _measure(r: int, k: int):
    graph = build_graph(ConstraintParams(r, k))
    return build_measure(compute_spectral(graph), graph)


def sample(req: m.SampleRequest) -> m.SampleResponse:
    measure = _measure(req.r, req.k)
    batch = sample_batch(measure, req.n, req.m, req.seed, req.threads)
    strands = [encode_word(row, req.format) for row in batch.strands]
    return m.SampleResponse(
        r=req.r, k=req.k, n=req.n, m=req.m, seed=req.seed,
        format=req.format, strands=strands,
    )


def _infer_r(req_r: int | None, fmt: str, words: list[tuple[int, ...]], reference: str) -> int:
    if req_r is not None:
        return req_r
    if fmt == "acgt":
        return 4
    high = max((max(w) for w in words if w), default=-1)
    if reference.startswith(("periodic:", "finite:")):
        body = reference.split(":", 1)[1]
        ref_word = decode_word(body, "digits") if body.isdigit() else decode_word(body, "acgt")
        high = max(high, max(ref_word, default=-1))
    if high < 0:
        raise InvalidParams("cannot infer alphabet size; pass r explicitly")
    return max(high + 1, 2)


def cost(req: m.CostRequest) -> m.CostResponse:
    words = [decode_word(s, req.format) for s in req.strands]
    r = _infer_r(req.r, req.format, words, req.reference)
    for w in words:
        for s in w:
            if s >= r:
                raise InvalidParams(f"strand symbol {s} outside alphabet of size {r}")
    ref = parse_reference(req.reference, r=r, incomplete_ok=req.allow_incomplete_reference)
    report = cost_report(words, ref, include_tau=req.include_tau)
    return m.CostResponse(
        reference=report.reference,
        r=r,
        batch_cost=report.batch_cost,
        per_strand_tau=report.per_strand_tau,
    )


def scs(req: m.ScsRequest) -> m.ScsResponse:
    words = [decode_word(s, req.format) for s in req.strands]
    length, witness = shortest_common_supersequence(words, max_strands=req.max_strands)
    return m.ScsResponse(
        scs_length=length, witness=encode_word(witness, req.format), format=req.format
    )


def graph(req: m.GraphRequest) -> m.GraphResponse:
    g = build_graph(ConstraintParams(req.r, req.k))
    return m.GraphResponse(
        r=req.r, k=req.k, n_states=g.n_states, triples=g.triples()
    )


def experiment(req: m.ExperimentRequest) -> m.ExperimentResponse:
    config = ExperimentConfig.from_dict(req.config.model_dump())
    if req.kind == "theorem1":
        report = cost_concentration_experiment(config, threads=req.threads)
    else:
        report = dominance_experiment(config, threads=req.threads)
    return m.ExperimentResponse(
        kind=report.kind,
        config=report.config,
        results=report.results,
        verdicts=[m.VerdictModel(**v) for v in report.verdicts],
        passed=report.passed,
    )


def health() -> m.HealthResponse:
    return m.HealthResponse(status="ok", version=__version__)
