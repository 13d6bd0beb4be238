"""Request/response models for the engine service API."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class _Schema(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TransferRequest(_Schema):
    sentences: list[str] = Field(min_length=1)
    config: str
    config_dir: str | None = None
    want_trace: bool = False


class SentenceRecordModel(_Schema):
    index: int
    input: str
    output: str
    stop_reason: str
    steps_taken: int
    objective: float | None
    transferred: bool
    error: str | None = None


class ReportModel(_Schema):
    accuracy: float
    bleu: float
    gm: float
    hm: float
    ppl: float


class TransferResponse(_Schema):
    outputs: list[str]
    report: ReportModel
    records: list[SentenceRecordModel]
    trace: list[str] | None = None


class EvaluateRequest(_Schema):
    hypotheses: list[str] = Field(min_length=1)
    reference_sets: list[list[str]] = Field(min_length=1)
    config: str
    config_dir: str | None = None


class EvaluateResponse(_Schema):
    report: ReportModel


class TrainLmRequest(_Schema):
    corpus: list[str] = Field(min_length=1)
    order: int = Field(ge=1)
    delta: float = Field(gt=0, le=1)


class TrainLmResponse(_Schema):
    model_b64: str
    vocab_size: int


class CompareSearchRequest(_Schema):
    sentences: list[str] = Field(min_length=1)
    config: str
    config_dir: str | None = None
    algos: list[str] = Field(min_length=1)
    seeds: int = Field(ge=1, default=1)


class CompareSearchResponse(_Schema):
    comparison: dict


class ErrorBody(_Schema):
    error: str
    kind: str
