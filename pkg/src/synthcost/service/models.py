"""Request/response schemas for the service (and the CLI's JSON output).

Every response carries schema_version; the JSON Schema files shipped under
docs/schemas are generated from these models and tested for drift.
"""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

SCHEMA_VERSION = 1

StrandFormat = Literal["digits", "acgt"]


class _Response(BaseModel):
    model_config = ConfigDict(populate_by_name=True)
    schema_version: int = SCHEMA_VERSION


class CapacityRequest(BaseModel):
    r: int = Field(ge=2)
    k: int = Field(ge=1)
    tol: float = Field(default=1e-12, gt=0)


class CapacityResponse(_Response):
    r: int
    k: int
    growth_rate: float = Field(alias="lambda")
    capacity: float


class EigenvectorRequest(BaseModel):
    r: int = Field(ge=2)
    k: int = Field(ge=1)
    include_left: bool = False


class EigenvectorResponse(_Response):
    r: int
    k: int
    growth_rate: float = Field(alias="lambda")
    phi: list[float]
    xi: Optional[list[float]] = None


class SampleRequest(BaseModel):
    r: int = Field(ge=2)
    k: int = Field(ge=1)
    n: int = Field(ge=1)
    m: int = Field(ge=1)
    seed: int = Field(ge=0, lt=2**64)
    format: StrandFormat = "digits"
    threads: Optional[int] = Field(default=None, ge=1)


class SampleResponse(_Response):
    r: int
    k: int
    n: int
    m: int
    seed: int
    format: StrandFormat
    strands: list[str]


class CostRequest(BaseModel):
    strands: list[str]
    reference: str
    format: StrandFormat = "digits"
    r: Optional[int] = Field(default=None, ge=2)
    include_tau: bool = True
    allow_incomplete_reference: bool = False


class CostResponse(_Response):
    reference: str
    r: int
    batch_cost: int
    per_strand_tau: Optional[list[list[int]]] = None


class ScsRequest(BaseModel):
    strands: list[str]
    format: StrandFormat = "digits"
    max_strands: int = Field(default=4, ge=1)


class ScsResponse(_Response):
    scs_length: int
    witness: str
    format: StrandFormat


class GraphRequest(BaseModel):
    r: int = Field(ge=2)
    k: int = Field(ge=1)


class GraphResponse(_Response):
    r: int
    k: int
    n_states: int
    triples: list[tuple[int, int, int]]


class ExperimentConfigModel(BaseModel):
    # a typoed knob must fail loudly, not silently run with defaults
    model_config = ConfigDict(extra="forbid")

    r: int = Field(ge=2)
    k: int = Field(ge=1)
    n: int = Field(ge=1)
    m: int = Field(ge=1)
    trials: int = Field(ge=2)
    seed: int = Field(ge=0, lt=2**64)
    epsilon: float = Field(default=0.02, gt=0)
    references: Optional[list[str]] = None
    t_grid: int = Field(default=20, ge=2)


class ExperimentRequest(BaseModel):
    kind: Literal["theorem1", "dominance"]
    config: ExperimentConfigModel
    threads: Optional[int] = Field(default=None, ge=1)


class VerdictModel(BaseModel):
    name: str
    passed: bool
    detail: str


class ExperimentResponse(_Response):
    kind: str
    config: dict
    results: dict
    verdicts: list[VerdictModel]
    passed: bool


class HealthResponse(_Response):
    status: str
    version: str


RESPONSE_MODELS = {
    "capacity": CapacityResponse,
    "eigenvector": EigenvectorResponse,
    "sample": SampleResponse,
    "cost": CostResponse,
    "scs": ScsResponse,
    "graph": GraphResponse,
    "experiment": ExperimentResponse,
    "health": HealthResponse,
}
