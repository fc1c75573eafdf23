"""Pydantic request and response models for the workbench service.

Every response carries schema_version so downstream tooling can pin the
JSON layout.  Requests that need a truncation level accept exactly one of
R (absolute) or theta (R = N^theta); the validator enforces the choice.
"""

from pydantic import BaseModel, Field, field_validator, model_validator

SCHEMA_VERSION = 1


class _TruncationMixin(BaseModel):
    R: float | None = None
    theta: float | None = Field(default=None, gt=0, lt=1)

    @model_validator(mode="after")
    def _one_of_R_theta(self):
        if (self.R is None) == (self.theta is None):
            raise ValueError("give exactly one of R or theta")
        return self


def _check_offsets(offsets: list[int]) -> list[int]:
    if not offsets:
        raise ValueError("offsets must be nonempty")
    if len(set(offsets)) != len(offsets):
        raise ValueError("offsets must be distinct")
    return sorted(offsets)


# ---------------------------------------------------------------- tuples

class AdmissibleRequest(BaseModel):
    offsets: list[int]

    _norm = field_validator("offsets")(_check_offsets)


class AdmissibleResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    offsets: list[int]
    k: int
    diameter: int
    admissible: bool
    residue_counts: dict[int, int]  # nu_p for primes p <= k


class ResidueRequest(BaseModel):
    offsets: list[int]
    p: int = Field(ge=2)

    _norm = field_validator("offsets")(_check_offsets)


class ResidueResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    p: int
    nu: int


class SingularSeriesRequest(BaseModel):
    offsets: list[int]
    tol: float = Field(default=1e-6, gt=0)

    _norm = field_validator("offsets")(_check_offsets)


class SingularSeriesResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    offsets: list[int]
    value: float
    truncation_bound: float
    cutoff_prime: int
    admissible: bool


class NarrowestRequest(BaseModel):
    k: int = Field(ge=1, le=10)
    diameter_cap: int | None = None


class NarrowestResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    k: int
    found: bool
    offsets: list[int] | None
    diameter: int | None


class GallagherRequest(BaseModel):
    k: int = Field(ge=1)
    h: int = Field(ge=1)
    tol: float = Field(default=1e-6, gt=0)

    @model_validator(mode="after")
    def _h_at_least_k(self):
        if self.h < self.k:
            raise ValueError("need h >= k")
        return self


class GallagherResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    k: int
    h: int
    ordered_sum: float
    ratio_ordered: float
    set_sum: float
    ratio_set: float


# ---------------------------------------------------------------- weights

class WeightTableRequest(BaseModel):
    kind: str = Field(pattern="^(lambda_R|lambda_lower_R|gpy|selberg|moment)$")
    start: int = Field(ge=0)
    end: int
    R: float = Field(ge=1)
    offsets: list[int] | None = None
    ell: int | None = None
    restriction: int | None = None
    moment_k: int | None = Field(default=None, ge=1, le=3)
    window: int | None = Field(default=None, ge=1)
    threads: int = Field(default=1, ge=1, le=64)
    max_values: int = Field(default=0, ge=0)  # how many values to inline in the response

    @model_validator(mode="after")
    def _consistent(self):
        if self.end <= self.start:
            raise ValueError("need end > start")
        if self.kind in ("gpy", "selberg") and not self.offsets:
            raise ValueError(f"kind {self.kind} needs offsets")
        if self.kind == "gpy" and self.ell is None:
            raise ValueError("kind gpy needs ell")
        if self.kind == "moment" and (self.moment_k is None or self.window is None):
            raise ValueError("kind moment needs moment_k and window")
        if self.offsets is not None:
            _check_offsets(self.offsets)
        return self


class WeightTableResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    kind: str
    start: int
    end: int
    R: float
    count: int
    sum: float
    sum_sq: float
    min: float
    max: float
    values: list[float] | None  # first max_values entries when requested


# ------------------------------------------------------------ correlations

class CorrelationReportModel(BaseModel):
    schema_version: int = SCHEMA_VERSION
    kind: str
    N: int
    R: float | None
    params: dict
    empirical: float
    predicted_main: float | None
    ratio: float | None


class CorrelationListResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    reports: list[CorrelationReportModel]


class PairRequest(_TruncationMixin):
    N: int = Field(ge=10)
    shift: int
    tol: float = Field(default=1e-6, gt=0)
    threads: int = Field(default=1, ge=1, le=64)

    @field_validator("shift")
    @classmethod
    def _nonzero(cls, v):
        if v == 0:
            raise ValueError("shift must be nonzero; the diagonal is corr/self")
        return v


class SelfRequest(_TruncationMixin):
    N: int = Field(ge=10)
    threads: int = Field(default=1, ge=1, le=64)


class GpyPairRequest(_TruncationMixin):
    N: int = Field(ge=10)
    offsets1: list[int]
    ell1: int = Field(ge=0)
    offsets2: list[int]
    ell2: int = Field(ge=0)
    size_cap: int = Field(default=20, ge=1)
    threads: int = Field(default=1, ge=1, le=64)

    _n1 = field_validator("offsets1")(_check_offsets)
    _n2 = field_validator("offsets2")(_check_offsets)


class GpyThetaRequest(GpyPairRequest):
    h0: int


class HardyLittlewoodRequest(BaseModel):
    offsets: list[int]
    N: int = Field(ge=10)
    tol: float = Field(default=1e-6, gt=0)
    threads: int = Field(default=1, ge=1, le=64)

    _norm = field_validator("offsets")(_check_offsets)


class SecondMomentRequest(BaseModel):
    N: int = Field(ge=10)
    lambda_param: float = Field(gt=0, le=10)
    threads: int = Field(default=1, ge=1, le=64)


# --------------------------------------------------------------- detectors

class DetectorReportModel(BaseModel):
    schema_version: int = SCHEMA_VERSION
    form: str
    params: dict
    total: float
    components: dict[str, float]
    positive: bool
    witnesses: list[dict]
    witness_count: int


class FirstMomentRequest(_TruncationMixin):
    N: int = Field(ge=100)
    lambda_param: float = Field(gt=0, le=10)
    threads: int = Field(default=1, ge=1, le=64)


class MollifiedRequest(_TruncationMixin):
    N: int = Field(ge=100)
    lambda_param: float = Field(gt=0, le=10)
    rho: float = Field(ge=0)
    C: float = Field(ge=0)
    threads: int = Field(default=1, ge=1, le=64)
    witness_cap: int = Field(default=1000, ge=0)


class GpyFormRequest(_TruncationMixin):
    N: int = Field(ge=100)
    h: int = Field(ge=1)
    k: int = Field(ge=1)
    ell: int = Field(ge=0)
    r: int = Field(ge=0)
    threads: int = Field(default=1, ge=1, le=64)
    witness_cap: int = Field(default=1000, ge=0)


class GsRequest(_TruncationMixin):
    offsets: list[int]
    ell: int = Field(ge=0)
    r: int = Field(ge=0)
    N: int = Field(ge=100)
    threads: int = Field(default=1, ge=1, le=64)
    witness_cap: int = Field(default=1000, ge=0)

    _norm = field_validator("offsets")(_check_offsets)


class HeathbrownRequest(BaseModel):
    pairs: list[list[int]]  # [[a1, b1], [a2, b2], ...]
    rho: float = Field(ge=0)
    x: int = Field(ge=10)
    R: float | None = None  # defaults to x^(1/4)
    threads: int = Field(default=1, ge=1, le=64)
    witness_cap: int = Field(default=10000, ge=0)

    @field_validator("pairs")
    @classmethod
    def _pairs_shape(cls, v):
        if not v or any(len(p) != 2 for p in v):
            raise ValueError("pairs must be a nonempty list of [a, b] entries")
        return v


class GapScanRequest(BaseModel):
    limit: int = Field(ge=100)
    r: int = Field(default=1, ge=1)
    threshold: float = Field(default=1.0, gt=0)
    max_rows: int = Field(default=1000, ge=0)


class GapScanResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    limit: int
    r: int
    threshold: float
    count: int
    min_normalized: float
    min_at: int
    min_raw_gap: int
    proportion_below: float
    rows: list[list[float]]
    rows_capped: bool


# ------------------------------------------------------------ distribution

class ThetaProgressionRequest(BaseModel):
    N: int = Field(ge=2)
    q: int = Field(ge=1)
    a: int = Field(ge=0)

    @model_validator(mode="after")
    def _a_below_q(self):
        if self.a >= self.q:
            raise ValueError("need 0 <= a < q")
        return self


class ThetaProgressionResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    N: int
    q: int
    a: int
    value: float


class BvRequest(BaseModel):
    N: int = Field(ge=10)
    Q: int = Field(ge=1)
    A: float = Field(default=1.0)


class LevelProbeModel(BaseModel):
    schema_version: int = SCHEMA_VERSION
    N: int
    Q: int
    A: float
    alpha: float | None
    total: float
    normalized: float
    per_q: list[float]


class LevelProbeRequest(BaseModel):
    N: int = Field(ge=10)
    alphas: list[float]
    A: float = Field(default=1.0)

    @field_validator("alphas")
    @classmethod
    def _nonempty(cls, v):
        if not v:
            raise ValueError("alphas must be nonempty")
        return v


class LevelProbeListResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    reports: list[LevelProbeModel]


# -------------------------------------------------------------- almost primes

class E2SieveRequest(BaseModel):
    limit: int = Field(ge=6)
    max_values: int = Field(default=100, ge=0)


class E2SieveResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    limit: int
    count: int
    values: list[int]
    values_capped: bool


class E2GapsRequest(BaseModel):
    limit: int = Field(ge=100)
    r: int = Field(default=1, ge=1)


class E2GapsResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    limit: int
    r: int
    count: int
    histogram: dict[int, int]
    min_gap: int
    consecutive_leq6: int


class MetaResponse(BaseModel):
    schema_version: int = SCHEMA_VERSION
    package: str
    version: str
