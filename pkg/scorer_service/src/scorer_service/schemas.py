"""Wire schemas for the scorer endpoints (protocol version 1).

Every request carries ``v`` = 1 and an ``id`` that the response must
echo.  /v1/style and /v1/logprobs additionally accept a batch form
(``batch`` array of at most 256 items).
"""

from __future__ import annotations

import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator

MAX_BATCH = 256


class _Message(BaseModel):
    model_config = ConfigDict(extra="forbid")


def _finite(values, name: str):
    for value in values:
        if not math.isfinite(value):
            raise ValueError(f"{name} must be finite")
    return values


class StyleRequest(_Message):
    v: Literal[1]
    id: str
    prompt: str
    styles: tuple[str, str]
    exemplars: tuple[str, ...] | None = None


class StyleQuery(_Message):
    prompt: str
    styles: tuple[str, str]
    exemplars: tuple[str, ...] | None = None


class StyleBatchRequest(_Message):
    v: Literal[1]
    id: str
    batch: tuple[StyleQuery, ...] = Field(min_length=1, max_length=MAX_BATCH)


class StyleResponse(_Message):
    id: str
    p: tuple[float, float]

    @field_validator("p")
    @classmethod
    def _check(cls, p):
        _finite(p, "p")
        for value in p:
            if not 0.0 <= value <= 1.0:
                raise ValueError("probabilities must lie in [0, 1]")
        return p


class StyleAnswer(_Message):
    p: tuple[float, float]


class StyleBatchResponse(_Message):
    id: str
    batch: tuple[StyleAnswer, ...]


class LogprobsRequest(_Message):
    v: Literal[1]
    id: str
    tokens: tuple[str, ...] = Field(min_length=1)


class TokensItem(_Message):
    tokens: tuple[str, ...] = Field(min_length=1)


class LogprobsBatchRequest(_Message):
    v: Literal[1]
    id: str
    batch: tuple[TokensItem, ...] = Field(min_length=1, max_length=MAX_BATCH)


class LogprobsResponse(_Message):
    id: str
    logprobs: tuple[float, ...]

    @field_validator("logprobs")
    @classmethod
    def _check(cls, values):
        _finite(values, "logprobs")
        for value in values:
            if value > 0.0:
                raise ValueError("log probabilities must be <= 0")
        return values


class LogprobsAnswer(_Message):
    logprobs: tuple[float, ...]


class LogprobsBatchResponse(_Message):
    id: str
    batch: tuple[LogprobsAnswer, ...]


class EmbedRequest(_Message):
    v: Literal[1]
    id: str
    tokens: tuple[str, ...] = Field(min_length=1)


class EmbedResponse(_Message):
    id: str
    dim: int = Field(ge=1)
    token_vecs: tuple[tuple[float, ...], ...]
    sentence_vec: tuple[float, ...]


class CandidatesRequest(_Message):
    v: Literal[1]
    id: str
    tokens: tuple[str, ...] = Field(min_length=1)
    kind: Literal["replace", "insert"]
    position: int = Field(ge=0)
    k: int = Field(ge=1)


class CandidatesResponse(_Message):
    id: str
    words: tuple[str, ...]
