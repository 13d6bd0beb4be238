"""FastAPI application wrapping the engine.

Error mapping mirrors the CLI exit codes: configuration problems are
400, scorer/backend failures are 502, anything else is 500.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from ..errors import ConfigError, ScoringError
from . import ops
from .schemas import (
    CompareSearchRequest,
    CompareSearchResponse,
    EvaluateRequest,
    EvaluateResponse,
    TrainLmRequest,
    TrainLmResponse,
    TransferRequest,
    TransferResponse,
)


def create_app() -> FastAPI:
    app = FastAPI(title="styledit", version="0.1.0")

    @app.exception_handler(ConfigError)
    async def _config_error(request: Request, exc: ConfigError):
        return JSONResponse(status_code=400, content={"error": str(exc), "kind": "config"})

    @app.exception_handler(ScoringError)
    async def _scoring_error(request: Request, exc: ScoringError):
        return JSONResponse(status_code=502, content={"error": str(exc), "kind": "backend"})

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok"}

    @app.post("/api/transfer", response_model=TransferResponse)
    def transfer(request: TransferRequest) -> TransferResponse:
        return ops.transfer(request)

    @app.post("/api/evaluate", response_model=EvaluateResponse)
    def evaluate(request: EvaluateRequest) -> EvaluateResponse:
        return ops.evaluate(request)

    @app.post("/api/train-lm", response_model=TrainLmResponse)
    def train_lm(request: TrainLmRequest) -> TrainLmResponse:
        return ops.train_lm(request)

    @app.post("/api/compare-search", response_model=CompareSearchResponse)
    def compare_search(request: CompareSearchRequest) -> CompareSearchResponse:
        return ops.compare(request)

    return app


app = create_app()
