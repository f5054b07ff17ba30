"""Request/response schemas for the HTTP service.

Heavy artifacts (datasets, exports, logs, curves) are exchanged through paths
on the service host, not inlined in JSON; responses carry the manifests and
summaries a client needs to chain calls.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    version: str


class SolveRequest(BaseModel):
    num_values: int = Field(ge=2)
    target_index: int = Field(ge=0)
    objects: list[list[int]] = Field(min_length=2)
    algorithm: Literal["hitting", "enum"] = "hitting"


class WitnessPair(BaseModel):
    attribute: int
    value: int


class SolveResponse(BaseModel):
    solvable: bool
    min_symbols: int | None
    witness: list[WitnessPair] | None
    algorithm: str


class MonteCarloResult(BaseModel):
    probability: float
    stderr: float
    trials: int
    successes: int
    seed: int


class ProbRequest(BaseModel):
    n: int = Field(ge=1)
    m: int = Field(ge=0)
    num_classes: int = Field(ge=1)
    monte_carlo_trials: int | None = Field(default=None, ge=1)
    seed: int = Field(default=0, ge=0)


class ProbResponse(BaseModel):
    p_class_at_least: float
    p_exists_class_at_least: float
    monte_carlo: MonteCarloResult | None = None


class HistRequest(BaseModel):
    num_attributes: int = Field(default=20, ge=1)
    num_values: int = Field(default=4, ge=2)
    num_distractors: int = Field(default=63, ge=1)
    trials: int = Field(ge=1)
    seed: int = Field(default=0, ge=0)
    workers: int = Field(default=1, ge=1)


class HistResponse(BaseModel):
    trials: int
    histogram: dict[str, int]


class SampleRequest(BaseModel):
    num_attributes: int = Field(default=20, ge=1)
    num_values: int = Field(default=4, ge=2)
    num_distractors: int = Field(default=63, ge=1)
    buckets: list[int] = Field(default=[2, 3], min_length=1)
    per_bucket: int = Field(default=10_000, ge=1)
    seed: int = Field(default=0, ge=0)
    max_attempts: int | None = Field(default=None, ge=1)
    train_fraction: float = Field(default=0.8, gt=0.0, lt=1.0)
    out_dir: str
    overwrite: bool = False
    workers: int = Field(default=1, ge=1)


class SampleResponse(BaseModel):
    out_dir: str
    manifest: dict


class VerifyRequest(BaseModel):
    dataset: str


class VerifyResponse(BaseModel):
    ok: bool
    instances_checked: int
    bucket_counts: dict[str, int]


class ExportRequest(BaseModel):
    dataset: str
    split_seed: int = Field(default=0, ge=0)
    out_dir: str | None = None
    overwrite: bool = False


class ExportResponse(BaseModel):
    out_dir: str
    headers: list[dict]


class EvalRequest(BaseModel):
    dataset: str
    buckets: list[int] | None = None
    max_lengths: list[int] = Field(default=[1, 2, 3, 4, 5], min_length=1)
    episodes_per_instance: int = Field(default=1, ge=1)
    seed: int = Field(default=0, ge=0)
    workers: int = Field(default=1, ge=1)
    log_out: str | None = None
    curve_dir: str | None = None


class EvalPoint(BaseModel):
    bucket: int
    max_length: int
    instances: int
    episodes: int
    empirical_accuracy: float
    stderr: float
    expected_accuracy: float


class EvalResponse(BaseModel):
    points: list[EvalPoint]
    log_path: str | None = None
    curve_paths: list[str] = []


class AnalyzeRequest(BaseModel):
    curve_path: str | None = None
    points: dict[int, float] | None = None
    source: str = "oracle"
    epsilon: float = Field(default=0.02, ge=0.0, lt=1.0)


class GapRow(BaseModel):
    max_length: int
    accuracy: float
    gap: float


class AnalyzeResponse(BaseModel):
    source: str
    epsilon: float
    effective_symbols: int
    max_accuracy: float
    table: list[GapRow]


class LogStatsRequest(BaseModel):
    log_path: str


class LogStatsResponse(BaseModel):
    episodes: int
    length_histogram: dict[int, int]
    symbol_histogram: dict[int, int]
