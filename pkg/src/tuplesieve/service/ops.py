"""Operation registry: one entry per experiment endpoint.

Each operation couples a route path with its request model and a handler
turning the request into a response model.  The FastAPI app mounts every
entry; the CLI uses the same registry to dispatch in-process or over HTTP,
so both front ends share one contract.
"""

from dataclasses import dataclass
from typing import Callable

from pydantic import BaseModel

from .. import almost_primes, correlations, detectors, progressions, tuples, weights
from ..accum import block_sum
from ..tuples import OffsetTuple
from . import models as m


@dataclass(frozen=True)
class Operation:
    name: str           # CLI name, e.g. "corr self"
    path: str           # HTTP route
    request_model: type[BaseModel]
    handler: Callable[[BaseModel], BaseModel]
    summary: str


def _corr_model(rep: correlations.CorrelationReport) -> m.CorrelationReportModel:
    return m.CorrelationReportModel(
        kind=rep.kind, N=rep.N, R=rep.R, params=_jsonable(rep.params),
        empirical=rep.empirical, predicted_main=rep.predicted_main, ratio=rep.ratio)


def _detector_model(rep: detectors.DetectorReport) -> m.DetectorReportModel:
    return m.DetectorReportModel(
        form=rep.form, params=_jsonable(rep.params), total=rep.total,
        components={k: float(v) for k, v in rep.components.items()},
        positive=rep.positive, witnesses=rep.witnesses, witness_count=rep.witness_count)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return obj.item()
    return obj


# ---------------------------------------------------------------- handlers

def _admissible(req: m.AdmissibleRequest) -> m.AdmissibleResponse:
    H = OffsetTuple(tuple(req.offsets))
    counts = {p: tuples.residue_count(H, p) for p in tuples._small_primes(H.k)}
    return m.AdmissibleResponse(offsets=list(H.offsets), k=H.k, diameter=H.diameter,
                                admissible=tuples.is_admissible(H), residue_counts=counts)


def _residues(req: m.ResidueRequest) -> m.ResidueResponse:
    H = OffsetTuple(tuple(req.offsets))
    return m.ResidueResponse(p=req.p, nu=tuples.residue_count(H, req.p))


def _singular(req: m.SingularSeriesRequest) -> m.SingularSeriesResponse:
    H = OffsetTuple(tuple(req.offsets))
    val = tuples.singular_series(H, req.tol)
    return m.SingularSeriesResponse(
        offsets=list(H.offsets), value=val.value, truncation_bound=val.truncation_bound,
        cutoff_prime=val.cutoff_prime, admissible=tuples.is_admissible(H))


def _narrowest(req: m.NarrowestRequest) -> m.NarrowestResponse:
    found = tuples.narrowest_admissible(req.k, req.diameter_cap)
    if found is None:
        return m.NarrowestResponse(k=req.k, found=False, offsets=None, diameter=None)
    return m.NarrowestResponse(k=req.k, found=True, offsets=list(found.offsets),
                               diameter=found.diameter)


def _gallagher(req: m.GallagherRequest) -> m.GallagherResponse:
    rep = tuples.gallagher_average(req.k, req.h, req.tol)
    return m.GallagherResponse(k=rep.k, h=rep.h, ordered_sum=rep.ordered_sum,
                               ratio_ordered=rep.ratio_ordered, set_sum=rep.set_sum,
                               ratio_set=rep.ratio_set)


def _weight_table(req: m.WeightTableRequest) -> m.WeightTableResponse:
    table = build_weight_table(req)
    v = table.values
    shown = [float(x) for x in v[:req.max_values]] if req.max_values else None
    return m.WeightTableResponse(
        kind=table.kind, start=table.start, end=table.end, R=table.R,
        count=int(v.size), sum=block_sum(v), sum_sq=block_sum(v * v),
        min=float(v.min()), max=float(v.max()), values=shown)


def build_weight_table(req: m.WeightTableRequest) -> weights.WeightTable:
    """Shared by the endpoint and the CLI export path."""
    if req.kind == "lambda_R":
        return weights.lambda_r_interval(req.start, req.end, req.R, req.threads)
    if req.kind == "lambda_lower_R":
        return weights.lambda_lower_r_interval(req.start, req.end, req.R, req.threads)
    if req.kind == "gpy":
        return weights.gpy_weight_interval(OffsetTuple(tuple(req.offsets)), req.ell,
                                           req.start, req.end, req.R,
                                           restriction=req.restriction, threads=req.threads)
    if req.kind == "selberg":
        return weights.selberg_weight_interval(OffsetTuple(tuple(req.offsets)),
                                               req.start, req.end, req.R, req.threads)
    return weights.moment_weight_interval(req.moment_k, req.window,
                                          req.start, req.end, req.R, req.threads)


def _corr_pair(req: m.PairRequest) -> m.CorrelationListResponse:
    rr, lr = correlations.corr_pair(req.N, req.shift, R=req.R, theta=req.theta,
                                    tol=req.tol, threads=req.threads)
    return m.CorrelationListResponse(reports=[_corr_model(rr), _corr_model(lr)])


def _corr_self(req: m.SelfRequest) -> m.CorrelationListResponse:
    rr, lr = correlations.corr_self(req.N, R=req.R, theta=req.theta, threads=req.threads)
    return m.CorrelationListResponse(reports=[_corr_model(rr), _corr_model(lr)])


def _corr_gpy_pair(req: m.GpyPairRequest) -> m.CorrelationListResponse:
    rep = correlations.corr_gpy_pair(
        OffsetTuple(tuple(req.offsets1)), req.ell1, OffsetTuple(tuple(req.offsets2)),
        req.ell2, req.N, R=req.R, theta=req.theta, size_cap=req.size_cap, threads=req.threads)
    return m.CorrelationListResponse(reports=[_corr_model(rep)])


def _corr_gpy_theta(req: m.GpyThetaRequest) -> m.CorrelationListResponse:
    rep = correlations.corr_gpy_theta(
        OffsetTuple(tuple(req.offsets1)), req.ell1, OffsetTuple(tuple(req.offsets2)),
        req.ell2, req.h0, req.N, R=req.R, theta=req.theta, size_cap=req.size_cap,
        threads=req.threads)
    return m.CorrelationListResponse(reports=[_corr_model(rep)])


def _corr_hl(req: m.HardyLittlewoodRequest) -> m.CorrelationListResponse:
    lam, cnt = correlations.hardy_littlewood_count(
        OffsetTuple(tuple(req.offsets)), req.N, tol=req.tol, threads=req.threads)
    return m.CorrelationListResponse(reports=[_corr_model(lam), _corr_model(cnt)])


def _corr_second_moment(req: m.SecondMomentRequest) -> m.CorrelationListResponse:
    rep = correlations.second_moment(req.N, req.lambda_param, threads=req.threads)
    return m.CorrelationListResponse(reports=[_corr_model(rep)])


def _detect_first_moment(req: m.FirstMomentRequest) -> m.DetectorReportModel:
    return _detector_model(detectors.first_moment_gap(
        req.N, req.lambda_param, R=req.R, theta=req.theta, threads=req.threads))


def _detect_mollified(req: m.MollifiedRequest) -> m.DetectorReportModel:
    return _detector_model(detectors.mollified_moment(
        req.N, req.lambda_param, req.rho, req.C, R=req.R, theta=req.theta,
        threads=req.threads, witness_cap=req.witness_cap))


def _detect_gpy(req: m.GpyFormRequest) -> m.DetectorReportModel:
    return _detector_model(detectors.gpy_form(
        req.N, req.h, req.k, req.ell, req.r, R=req.R, theta=req.theta,
        threads=req.threads, witness_cap=req.witness_cap))


def _detect_gs(req: m.GsRequest) -> m.DetectorReportModel:
    return _detector_model(detectors.gs_single_tuple(
        OffsetTuple(tuple(req.offsets)), req.ell, req.r, req.N, R=req.R,
        theta=req.theta, threads=req.threads, witness_cap=req.witness_cap))


def _detect_heathbrown(req: m.HeathbrownRequest) -> m.DetectorReportModel:
    pairs = [(int(a), int(b)) for a, b in req.pairs]
    return _detector_model(detectors.heathbrown_Q(
        pairs, req.rho, req.x, R=req.R, threads=req.threads, witness_cap=req.witness_cap))


def _detect_gaps(req: m.GapScanRequest) -> m.GapScanResponse:
    rep = detectors.gap_scan(req.limit, req.r, req.threshold, req.max_rows)
    return m.GapScanResponse(
        limit=rep.limit, r=rep.r, threshold=rep.threshold, count=rep.count,
        min_normalized=rep.min_normalized, min_at=rep.min_at, min_raw_gap=rep.min_raw_gap,
        proportion_below=rep.proportion_below,
        rows=[[float(a), float(b), float(c)] for a, b, c in rep.rows],
        rows_capped=rep.rows_capped)


def _dist_theta(req: m.ThetaProgressionRequest) -> m.ThetaProgressionResponse:
    return m.ThetaProgressionResponse(
        N=req.N, q=req.q, a=req.a, value=progressions.theta_progression(req.N, req.q, req.a))


def _probe_model(rep: progressions.LevelProbeReport) -> m.LevelProbeModel:
    return m.LevelProbeModel(N=rep.N, Q=rep.Q, A=rep.A, alpha=rep.alpha,
                             total=rep.total, normalized=rep.normalized,
                             per_q=[float(x) for x in rep.per_q])


def _dist_bv(req: m.BvRequest) -> m.LevelProbeModel:
    return _probe_model(progressions.bv_sum(req.N, req.Q, A=req.A))


def _dist_probe(req: m.LevelProbeRequest) -> m.LevelProbeListResponse:
    reps = progressions.level_probe(req.N, req.alphas, A=req.A)
    return m.LevelProbeListResponse(reports=[_probe_model(r) for r in reps])


def _e2_sieve(req: m.E2SieveRequest) -> m.E2SieveResponse:
    table = almost_primes.e2_sieve(req.limit)
    vals = table.values
    return m.E2SieveResponse(limit=req.limit, count=int(vals.size),
                             values=[int(v) for v in vals[:req.max_values]],
                             values_capped=vals.size > req.max_values)


def _e2_gaps(req: m.E2GapsRequest) -> m.E2GapsResponse:
    rep = almost_primes.e2_gap_stats(req.limit, req.r)
    return m.E2GapsResponse(limit=rep.limit, r=rep.r, count=rep.count,
                            histogram=rep.histogram, min_gap=rep.min_gap,
                            consecutive_leq6=rep.consecutive_leq6)


OPERATIONS: dict[str, Operation] = {}


def _register(name: str, path: str, request_model, handler, summary: str) -> None:
    OPERATIONS[name] = Operation(name, path, request_model, handler, summary)


_register("tuples admissible", "/tuples/admissible", m.AdmissibleRequest, _admissible,
          "Admissibility and residue coverage of an offset tuple")
_register("tuples residues", "/tuples/residues", m.ResidueRequest, _residues,
          "Distinct residue classes of an offset tuple modulo a prime")
_register("tuples singular", "/tuples/singular-series", m.SingularSeriesRequest, _singular,
          "Singular series of an offset tuple with certified truncation error")
_register("tuples narrowest", "/tuples/narrowest", m.NarrowestRequest, _narrowest,
          "Narrowest admissible tuple of a given size, by exhaustive search")
_register("tuples gallagher", "/tuples/gallagher", m.GallagherRequest, _gallagher,
          "Average of the singular series over all tuples in a window")
_register("sums table", "/weights/table", m.WeightTableRequest, _weight_table,
          "Evaluate a divisor-sum weight table over an interval")
_register("corr pair", "/corr/pair", m.PairRequest, _corr_pair,
          "Shifted pair correlations of the truncated von Mangoldt sum")
_register("corr self", "/corr/self", m.SelfRequest, _corr_self,
          "Diagonal second moments of the truncated von Mangoldt sum")
_register("corr gpy-pair", "/corr/gpy-pair", m.GpyPairRequest, _corr_gpy_pair,
          "Raw correlation of two tuple weights")
_register("corr gpy-theta", "/corr/gpy-theta", m.GpyThetaRequest, _corr_gpy_theta,
          "Tuple-weight correlation with a prime log factor at a shifted point")
_register("corr hl", "/corr/hardy-littlewood", m.HardyLittlewoodRequest, _corr_hl,
          "Prime tuple counts against the singular series prediction")
_register("corr second-moment", "/corr/second-moment", m.SecondMomentRequest,
          _corr_second_moment, "Second moment of prime counts in short windows")
_register("detect first-moment", "/detect/first-moment", m.FirstMomentRequest,
          _detect_first_moment, "Square approximation error of window prime sums")
_register("detect mollified", "/detect/mollified", m.MollifiedRequest, _detect_mollified,
          "Mollified window positivity form with prime-mass witnesses")
_register("detect gpy", "/detect/gpy", m.GpyFormRequest, _detect_gpy,
          "Tuple-sum positivity form over all k-subsets of a window")
_register("detect gs", "/detect/gs", m.GsRequest, _detect_gs,
          "Single-tuple positivity form with tuple-weight mollifier")
_register("detect heathbrown", "/detect/heathbrown", m.HeathbrownRequest,
          _detect_heathbrown, "Divisor-penalty sieve form over linear forms")
_register("detect gaps", "/detect/gaps", m.GapScanRequest, _detect_gaps,
          "Normalized prime gap scan with minima and threshold proportions")
_register("dist theta", "/dist/theta", m.ThetaProgressionRequest, _dist_theta,
          "Log-weighted prime count in one arithmetic progression")
_register("dist bv", "/dist/bv", m.BvRequest, _dist_bv,
          "Summed worst-case progression error over moduli up to Q")
_register("dist probe", "/dist/probe", m.LevelProbeRequest, _dist_probe,
          "Progression error sweep over Q = N^alpha exponents")
_register("e2 sieve", "/e2/sieve", m.E2SieveRequest, _e2_sieve,
          "Enumerate products of two distinct primes")
_register("e2 gaps", "/e2/gaps", m.E2GapsRequest, _e2_gaps,
          "Gap histogram for products of two distinct primes")
