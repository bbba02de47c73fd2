"""Pydantic request/response models for the HTTP service.

JSON has no infinity literal, so exponent fields accept the string "inf";
band starts use the wire name "lambda" with "lam" accepted equivalently.
"""
from __future__ import annotations

import hashlib
import json
import math
from typing import Annotated, Any

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field


def _coerce_inf(v):
    if isinstance(v, str):
        s = v.strip().lower()
        if s in ("inf", "infinity", "+inf"):
            return math.inf
        return float(v)
    return v


Extended = Annotated[float, BeforeValidator(_coerce_inf)]


class _Request(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")

    def config_hash(self) -> str:
        blob = json.dumps(self.model_dump(mode="json"), sort_keys=True, default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:12]


class BandRequest(_Request):
    n: int = Field(ge=2, le=8)
    lam: float = Field(alias="lambda")
    eps: float


class CountBandRequest(BandRequest):
    list_points: bool = False
    oracle: bool = False


class CountBallRequest(_Request):
    n: int = Field(ge=2, le=8)
    r: float = Field(ge=0)


class ShellRequest(_Request):
    n: int = Field(ge=2, le=8)
    m: int = Field(ge=0)


class ExponentsRequest(_Request):
    n: int = Field(ge=2, le=8)
    ps: list[Extended] | None = None


class DensityRequest(BandRequest):
    dim: int | None = None
    seed: int = 0
    qs: list[Extended] = Field(default_factory=lambda: [2.0])


class KernelRequest(BandRequest):
    pass


class PoissonRequest(_Request):
    n: int = Field(ge=2, le=8)
    lam: float = Field(default=10.0, alias="lambda")
    eps: float = 0.5
    gaussian_width: float | None = None


class SchattenRequest(BandRequest):
    alpha: Extended = 1.0
    seed: int = 0
    terms: int = 6
    max_freq: int = 3


class SweepRequest(_Request):
    n: int = Field(ge=2, le=8)
    mode: str
    lam_min: float = Field(alias="lambda_min")
    lam_max: float = Field(alias="lambda_max")
    points: int = 20
    eps_rule: str = "shrink"
    eps_value: float = 1.0
    eps_exponent: float | None = None
    seed: int = 0
    trials: int = 20
    p: Extended | None = None
    jobs: int = 1


class _Response(BaseModel):
    model_config = ConfigDict(populate_by_name=True)
    config_hash: str


class CountBandResponse(_Response):
    n: int
    lam: float = Field(serialization_alias="lambda")
    eps: float
    count: int
    m_lo: int
    m_hi: int
    freqs: list[list[int]] | None = None


class CountBallResponse(_Response):
    n: int
    r: float
    count: int
    weyl_main: float
    remainder: float


class ShellResponse(_Response):
    n: int
    m: int
    multiplicity: int


class ExponentProfileModel(BaseModel):
    n: int
    p: Any
    sigma: float
    alpha: Any
    eps_power: float | None
    critical_p: float


class ExponentsResponse(_Response):
    profiles: list[ExponentProfileModel]


class DensityResponse(_Response):
    n: int
    lam: float = Field(serialization_alias="lambda")
    eps: float
    cluster_size: int
    dim: int
    seed: int
    trace: float
    norms: dict[str, float]
    sup_bracket: tuple[float, float]


class KernelResponse(_Response):
    n: int
    lam: float = Field(serialization_alias="lambda")
    eps: float
    total: float
    j_term: float
    i1_main: float
    i1_neighbor: float
    i21: float
    i2_zero: float
    i22: float
    reassembled: float
    quad_error: float
    ratio_two_term: float
    ratio_i1: float
    ratio_i22: float
    ratio_j: float


class PoissonResponse(_Response):
    n: int
    lattice_side: float
    translate_side: float
    rel_discrepancy: float
    translate_shells: int


class SchattenResponse(_Response):
    n: int
    lam: float = Field(serialization_alias="lambda")
    eps: float
    alpha: Any
    value: float
    bound_rhs: float | None
    ratio: float | None
    cluster_size: int
    seed: int
    trace_identity_rel_err: float


class ErrorResponse(BaseModel):
    error: str
    detail: str
