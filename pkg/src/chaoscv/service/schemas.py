"""Pydantic request/response models for the analysis service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from ..pipeline import RunConfig


class ConfigModel(BaseModel):
    """Analysis settings; field names mirror :class:`chaoscv.RunConfig`."""

    l_max: int = 3
    m_max: int = 6
    q_max: int = 8
    alpha: float = 0.05
    n_starts: int = 5
    base_seed: int = 42
    tol_g: float = 1e-6
    tol_f: float = 1e-10
    max_iterations: int = 500
    dither: float = 1e-3

    def to_run_config(self) -> RunConfig:
        return RunConfig(**self.model_dump())


class TripletModel(BaseModel):
    L: int
    m: int
    q: int


class ResultModel(BaseModel):
    signal_id: str
    label: str = ""
    lambda_hat: float
    p_value: float
    triplet: Optional[TripletModel] = None
    sse: Optional[float] = None
    M: Optional[int] = None
    se: Optional[float] = None
    clamped_steps: int = 0
    local_rates: Optional[list[float]] = None


class FailureModel(BaseModel):
    signal_id: str
    reason: str


class AnalyzeRequest(BaseModel):
    csv_text: str = Field(description="CSV content: header row, one column per signal")
    columns: Optional[list[str]] = None
    config: ConfigModel = ConfigModel()
    verbose: bool = False
    jobs: int = 1


class AnalyzeResponse(BaseModel):
    results: list[ResultModel]
    failures: list[FailureModel]
    table: str
    config: ConfigModel


class RankRequest(BaseModel):
    results: list[ResultModel]
    criterion: Literal["product", "ascending_p", "combined"] = "product"
    top_n: Optional[int] = None
    filter_nonpositive: bool = True


class RankedVariableModel(BaseModel):
    signal_id: str
    label: str
    lambda_hat: float
    p_value: float
    score: float
    rank: int


class RankResponse(BaseModel):
    criterion: str
    entries: list[RankedVariableModel]
    filtered_out: list[FailureModel]
    table: str


class GenerateRequest(BaseModel):
    kind: Literal["logistic", "henon", "lorenz", "ar1", "sine", "iid_noise"]
    parameters: dict[str, float] = {}
    n: int = 1000
    seed: int = 0
    noise_std: float = 0.0
    transient_skip: int = 0


class GenerateResponse(BaseModel):
    csv_text: str
    spec: dict


class HealthResponse(BaseModel):
    status: str
    version: str
