"""FastAPI application for the scorer endpoints.

Malformed requests return 400 with an error body; model failures return
500.  When a bearer token is configured, /v1/* requests must carry it.
Model inference is serialized behind a lock so concurrent requests stay
deterministic.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import ValidationError

from . import scoring
from .registry import ModelRegistry, RegistryError
from .schemas import (
    CandidatesRequest,
    CandidatesResponse,
    EmbedRequest,
    EmbedResponse,
    LogprobsAnswer,
    LogprobsBatchRequest,
    LogprobsBatchResponse,
    LogprobsRequest,
    LogprobsResponse,
    StyleAnswer,
    StyleBatchRequest,
    StyleBatchResponse,
    StyleRequest,
    StyleResponse,
)


def create_app(registry: ModelRegistry | None = None) -> FastAPI:
    registry = registry or ModelRegistry.from_env()
    app = FastAPI(title="scorer-service", version="0.1.0")
    inference_lock = threading.Lock()

    @app.exception_handler(RequestValidationError)
    async def _bad_request(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": str(exc.errors()[:1])})

    @app.exception_handler(RegistryError)
    async def _model_failure(request: Request, exc: RegistryError):
        return JSONResponse(status_code=500, content={"error": str(exc)})

    @app.middleware("http")
    async def _auth(request: Request, call_next):
        if registry.token and request.url.path.startswith("/v1/"):
            expected = f"Bearer {registry.token}"
            if request.headers.get("authorization") != expected:
                return JSONResponse(status_code=401, content={"error": "missing or bad token"})
        return await call_next(request)

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok", "device": str(registry.device)}

    async def _read_json(request: Request) -> dict:
        try:
            return await request.json()
        except Exception:
            raise RequestValidationError([{"msg": "body is not valid JSON"}])

    def _validate(model, body: dict):
        try:
            return model.model_validate(body)
        except ValidationError as err:
            raise RequestValidationError(err.errors())

    @app.post("/v1/style")
    async def style(request: Request):
        body = await _read_json(request)
        if "batch" in body:
            message = _validate(StyleBatchRequest, body)
            with inference_lock:
                answers = [
                    StyleAnswer(
                        p=scoring.style_probabilities(
                            registry.classifier, item.prompt, item.styles,
                            item.exemplars, registry.device,
                        )
                    )
                    for item in message.batch
                ]
            return StyleBatchResponse(id=message.id, batch=tuple(answers))
        message = _validate(StyleRequest, body)
        with inference_lock:
            p = scoring.style_probabilities(
                registry.classifier, message.prompt, message.styles,
                message.exemplars, registry.device,
            )
        return StyleResponse(id=message.id, p=p)

    @app.post("/v1/logprobs")
    async def logprobs(request: Request):
        body = await _read_json(request)
        if "batch" in body:
            message = _validate(LogprobsBatchRequest, body)
            with inference_lock:
                answers = [
                    LogprobsAnswer(
                        logprobs=tuple(
                            scoring.token_logprobs(registry.fluency, item.tokens, registry.device)
                        )
                    )
                    for item in message.batch
                ]
            return LogprobsBatchResponse(id=message.id, batch=tuple(answers))
        message = _validate(LogprobsRequest, body)
        with inference_lock:
            values = scoring.token_logprobs(registry.fluency, message.tokens, registry.device)
        return LogprobsResponse(id=message.id, logprobs=tuple(values))

    @app.post("/v1/embed")
    async def embed(request: Request):
        body = await _read_json(request)
        message = _validate(EmbedRequest, body)
        with inference_lock:
            token_vecs, sentence_vec = scoring.embed(
                registry.encoder, message.tokens, registry.device
            )
        return EmbedResponse(
            id=message.id,
            dim=len(sentence_vec),
            token_vecs=tuple(tuple(vec) for vec in token_vecs),
            sentence_vec=tuple(sentence_vec),
        )

    @app.post("/v1/candidates")
    async def candidates(request: Request):
        body = await _read_json(request)
        message = _validate(CandidatesRequest, body)
        limit = len(message.tokens) - 1 if message.kind == "replace" else len(message.tokens)
        if message.position > limit:
            raise RequestValidationError(
                [{"msg": f"position {message.position} invalid for {message.kind}"}]
            )
        with inference_lock:
            words = scoring.candidates(
                registry.encoder, message.tokens, message.kind,
                message.position, message.k, registry.device,
            )
        return CandidatesResponse(id=message.id, words=tuple(words))

    return app
