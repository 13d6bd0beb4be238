"""Wire protocol and client for remote scorer backends.

Four HTTP/1.1 endpoints with JSON bodies let a hosted model service
supply style probabilities, token log-probabilities, contextual
embeddings, and edit candidates:

    POST /v1/style       {"v":1,"id":..,"prompt":..,"styles":[s1,s2]}
                         -> {"id":..,"p":[p1,p2]}
    POST /v1/logprobs    {"v":1,"id":..,"tokens":[..]}
                         -> {"id":..,"logprobs":[..]}
    POST /v1/embed       {"v":1,"id":..,"tokens":[..]}
                         -> {"id":..,"dim":D,"token_vecs":[[..]..],"sentence_vec":[..]}
    POST /v1/candidates  {"v":1,"id":..,"tokens":[..],"kind":..,"position":..,"k":..}
                         -> {"id":..,"words":[..]}

/v1/style and /v1/logprobs also accept a batch form ({"v":1,"id":..,
"batch":[..]} -> {"id":..,"batch":[..]}, at most 256 items) so whole
neighborhoods can be scored per request.  Every response echoes the
request id; numeric fields must be finite.  Requests are idempotent, so
the client retries transport failures and 5xx responses.
"""

from __future__ import annotations

import itertools
import math
from typing import Literal, Sequence

import httpx
import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .errors import ProtocolError

PROTOCOL_VERSION = 1
MAX_BATCH = 256


class _Message(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    def to_json(self) -> str:
        return self.model_dump_json(exclude_none=True)

    @classmethod
    def from_json(cls, raw: str | bytes):
        return cls.model_validate_json(raw)


def _require_finite(values, field_name: str):
    for value in values:
        if not math.isfinite(value):
            raise ValueError(f"{field_name} must contain only finite numbers")
    return values


def _check_probability_pair(p):
    _require_finite(p, "p")
    for value in p:
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"probabilities must lie in [0, 1], got {value}")
    return p


def _check_logprob_values(values):
    _require_finite(values, "logprobs")
    for value in values:
        if value > 0.0:
            raise ValueError(f"log probabilities must be <= 0, got {value}")
    return values


class StyleRequest(_Message):
    v: Literal[1] = PROTOCOL_VERSION
    id: str
    prompt: str
    styles: tuple[str, str]
    exemplars: tuple[str, ...] | None = None


class StyleResponse(_Message):
    id: str
    p: tuple[float, float]

    @field_validator("p")
    @classmethod
    def _check_p(cls, p):
        return _check_probability_pair(p)


class StyleQuery(_Message):
    prompt: str
    styles: tuple[str, str]
    exemplars: tuple[str, ...] | None = None


class StyleBatchRequest(_Message):
    v: Literal[1] = PROTOCOL_VERSION
    id: str
    batch: tuple[StyleQuery, ...] = Field(min_length=1, max_length=MAX_BATCH)


class StyleAnswer(_Message):
    p: tuple[float, float]

    @field_validator("p")
    @classmethod
    def _check_p(cls, p):
        return _check_probability_pair(p)


class StyleBatchResponse(_Message):
    id: str
    batch: tuple[StyleAnswer, ...]


class LogprobsRequest(_Message):
    v: Literal[1] = PROTOCOL_VERSION
    id: str
    tokens: tuple[str, ...] = Field(min_length=1)


class LogprobsResponse(_Message):
    id: str
    logprobs: tuple[float, ...]

    @field_validator("logprobs")
    @classmethod
    def _check_logprobs(cls, values):
        return _check_logprob_values(values)


class TokensItem(_Message):
    tokens: tuple[str, ...] = Field(min_length=1)


class LogprobsBatchRequest(_Message):
    v: Literal[1] = PROTOCOL_VERSION
    id: str
    batch: tuple[TokensItem, ...] = Field(min_length=1, max_length=MAX_BATCH)


class LogprobsAnswer(_Message):
    logprobs: tuple[float, ...]

    @field_validator("logprobs")
    @classmethod
    def _check_logprobs(cls, values):
        return _check_logprob_values(values)


class LogprobsBatchResponse(_Message):
    id: str
    batch: tuple[LogprobsAnswer, ...]


class EmbedRequest(_Message):
    v: Literal[1] = PROTOCOL_VERSION
    id: str
    tokens: tuple[str, ...] = Field(min_length=1)


class EmbedResponse(_Message):
    id: str
    dim: int = Field(ge=1)
    token_vecs: tuple[tuple[float, ...], ...]
    sentence_vec: tuple[float, ...]

    @field_validator("token_vecs")
    @classmethod
    def _check_token_vecs(cls, vecs, info):
        for vec in vecs:
            _require_finite(vec, "token_vecs")
        return vecs

    @field_validator("sentence_vec")
    @classmethod
    def _check_sentence_vec(cls, vec):
        return _require_finite(vec, "sentence_vec")

    def check_dimensions(self) -> None:
        for vec in self.token_vecs:
            if len(vec) != self.dim:
                raise ValueError(f"token vector of length {len(vec)} != dim {self.dim}")
        if len(self.sentence_vec) != self.dim:
            raise ValueError(
                f"sentence vector of length {len(self.sentence_vec)} != dim {self.dim}"
            )


class CandidatesRequest(_Message):
    v: Literal[1] = PROTOCOL_VERSION
    id: str
    tokens: tuple[str, ...] = Field(min_length=1)
    kind: Literal["replace", "insert"]
    position: int = Field(ge=0)
    k: int = Field(ge=1)


class CandidatesResponse(_Message):
    id: str
    words: tuple[str, ...]

    @field_validator("words")
    @classmethod
    def _check_distinct(cls, words):
        if len(set(words)) != len(words):
            raise ValueError("candidate words must be distinct")
        return words


class ScorerClient:
    """Synchronous client for the scorer endpoints.

    Thread-safe for concurrent requests; responses are matched to
    requests by the echoed id.  Transport failures, timeouts, non-2xx
    statuses, and schema violations all surface as
    :class:`ProtocolError` naming the endpoint and offending field.
    """

    def __init__(
        self,
        base_url: str,
        *,
        timeout: float = 10.0,
        token: str | None = None,
        retries: int = 2,
        transport: httpx.BaseTransport | None = None,
    ):
        headers = {"Authorization": f"Bearer {token}"} if token else {}
        self._http = httpx.Client(
            base_url=base_url, timeout=timeout, headers=headers, transport=transport
        )
        self._retries = retries
        self._ids = itertools.count(1)

    def close(self) -> None:
        self._http.close()

    def __enter__(self) -> "ScorerClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _next_id(self) -> str:
        return f"req-{next(self._ids)}"

    def _build(self, endpoint: str, model, **fields):
        """Construct a request model; invalid arguments are refused
        client-side before anything goes on the wire."""
        try:
            return model(**fields)
        except ValidationError as err:
            first = err.errors()[0]
            field = ".".join(str(part) for part in first.get("loc", ())) or "request"
            raise ProtocolError(
                f"{endpoint} invalid request at {field}: {first.get('msg')}",
                endpoint=endpoint,
                request_id=fields.get("id"),
                field=field,
            ) from err

    def _post(self, endpoint: str, request: _Message) -> bytes:
        last_error: Exception | None = None
        for _ in range(self._retries + 1):
            try:
                response = self._http.post(endpoint, content=request.to_json(),
                                            headers={"content-type": "application/json"})
            except httpx.TransportError as err:
                last_error = err
                continue
            if response.status_code >= 500:
                last_error = ProtocolError(
                    f"{endpoint} returned status {response.status_code}",
                    endpoint=endpoint,
                    request_id=request.id,
                )
                continue
            if response.status_code >= 300:
                raise ProtocolError(
                    f"{endpoint} returned status {response.status_code}",
                    endpoint=endpoint,
                    request_id=request.id,
                )
            return response.content
        if isinstance(last_error, ProtocolError):
            raise last_error
        raise ProtocolError(
            f"{endpoint} unreachable: {last_error}", endpoint=endpoint, request_id=request.id
        ) from last_error

    def _parse(self, endpoint: str, request_id: str, model, raw: bytes):
        try:
            parsed = model.model_validate_json(raw)
        except ValidationError as err:
            first = err.errors()[0]
            field = ".".join(str(part) for part in first.get("loc", ())) or "body"
            raise ProtocolError(
                f"{endpoint} schema violation at {field}: {first.get('msg')}",
                endpoint=endpoint,
                request_id=request_id,
                field=field,
            ) from err
        if parsed.id != request_id:
            raise ProtocolError(
                f"{endpoint} echoed id {parsed.id!r}, expected {request_id!r}",
                endpoint=endpoint,
                request_id=request_id,
                field="id",
            )
        return parsed

    def _violation(self, endpoint: str, request_id: str, field: str, message: str):
        raise ProtocolError(
            f"{endpoint} schema violation at {field}: {message}",
            endpoint=endpoint,
            request_id=request_id,
            field=field,
        )

    # -- endpoint wrappers -------------------------------------------------

    def style(
        self,
        prompt: str,
        styles: tuple[str, str],
        exemplars: Sequence[str] | None = None,
    ) -> tuple[float, float]:
        request = self._build(
            "/v1/style",
            StyleRequest,
            id=self._next_id(),
            prompt=prompt,
            styles=styles,
            exemplars=tuple(exemplars) if exemplars else None,
        )
        raw = self._post("/v1/style", request)
        response = self._parse("/v1/style", request.id, StyleResponse, raw)
        return response.p

    def style_batch(
        self, queries: Sequence[tuple[str, tuple[str, str]]]
    ) -> list[tuple[float, float]]:
        request = self._build(
            "/v1/style",
            StyleBatchRequest,
            id=self._next_id(),
            batch=tuple(StyleQuery(prompt=p, styles=s) for p, s in queries),
        )
        raw = self._post("/v1/style", request)
        response = self._parse("/v1/style", request.id, StyleBatchResponse, raw)
        if len(response.batch) != len(queries):
            self._violation(
                "/v1/style", request.id, "batch",
                f"{len(response.batch)} answers for {len(queries)} queries",
            )
        return [answer.p for answer in response.batch]

    def logprobs(self, tokens: Sequence[str]) -> list[float]:
        request = self._build(
            "/v1/logprobs", LogprobsRequest, id=self._next_id(), tokens=tuple(tokens)
        )
        raw = self._post("/v1/logprobs", request)
        response = self._parse("/v1/logprobs", request.id, LogprobsResponse, raw)
        if len(response.logprobs) != len(tokens):
            self._violation(
                "/v1/logprobs", request.id, "logprobs",
                f"{len(response.logprobs)} values for {len(tokens)} tokens",
            )
        return list(response.logprobs)

    def logprobs_batch(self, sentences: Sequence[Sequence[str]]) -> list[list[float]]:
        request = self._build(
            "/v1/logprobs",
            LogprobsBatchRequest,
            id=self._next_id(),
            batch=tuple(TokensItem(tokens=tuple(tokens)) for tokens in sentences),
        )
        raw = self._post("/v1/logprobs", request)
        response = self._parse("/v1/logprobs", request.id, LogprobsBatchResponse, raw)
        if len(response.batch) != len(sentences):
            self._violation(
                "/v1/logprobs", request.id, "batch",
                f"{len(response.batch)} answers for {len(sentences)} sentences",
            )
        out: list[list[float]] = []
        for tokens, answer in zip(sentences, response.batch):
            if len(answer.logprobs) != len(tokens):
                self._violation(
                    "/v1/logprobs", request.id, "batch.logprobs",
                    f"{len(answer.logprobs)} values for {len(tokens)} tokens",
                )
            out.append(list(answer.logprobs))
        return out

    def embed(self, tokens: Sequence[str]) -> tuple[list[np.ndarray], np.ndarray]:
        request = self._build(
            "/v1/embed", EmbedRequest, id=self._next_id(), tokens=tuple(tokens)
        )
        raw = self._post("/v1/embed", request)
        response = self._parse("/v1/embed", request.id, EmbedResponse, raw)
        try:
            response.check_dimensions()
        except ValueError as err:
            self._violation("/v1/embed", request.id, "token_vecs", str(err))
        if len(response.token_vecs) != len(tokens):
            self._violation(
                "/v1/embed", request.id, "token_vecs",
                f"{len(response.token_vecs)} vectors for {len(tokens)} tokens",
            )
        token_vecs = [np.asarray(vec, dtype=np.float64) for vec in response.token_vecs]
        return token_vecs, np.asarray(response.sentence_vec, dtype=np.float64)

    def candidates(
        self, tokens: Sequence[str], kind: str, position: int, k: int
    ) -> tuple[str, ...]:
        request = self._build(
            "/v1/candidates",
            CandidatesRequest,
            id=self._next_id(),
            tokens=tuple(tokens),
            kind=kind,
            position=position,
            k=k,
        )
        raw = self._post("/v1/candidates", request)
        response = self._parse("/v1/candidates", request.id, CandidatesResponse, raw)
        if len(response.words) > k:
            self._violation(
                "/v1/candidates", request.id, "words",
                f"{len(response.words)} candidates exceed k={k}",
            )
        return response.words
