"""Service operations.

Both the FastAPI routes and the in-process CLI path call these
functions, so the engine behaves identically whether it is driven over
HTTP or directly.  Engines are cached per config text so a long-running
service does not reload backends on every request.
"""

from __future__ import annotations

import base64
import json
import math
import tempfile
from functools import lru_cache
from pathlib import Path

from ..core import Sentence
from ..errors import ConfigError
from ..fluency import train_ngram
from ..runner import Engine, compare_search, evaluate_outputs, parse_run_config, run_corpus
from .schemas import (
    CompareSearchRequest,
    CompareSearchResponse,
    EvaluateRequest,
    EvaluateResponse,
    ReportModel,
    SentenceRecordModel,
    TrainLmRequest,
    TrainLmResponse,
    TransferRequest,
    TransferResponse,
)


@lru_cache(maxsize=8)
def _engine_for(config_text: str, config_dir: str | None) -> Engine:
    return Engine(parse_run_config(config_text, base_dir=config_dir))


def reset_engine_cache() -> None:
    _engine_for.cache_clear()


def _parse_sentences(lines: list[str], what: str) -> list[Sentence]:
    sentences = []
    for i, line in enumerate(lines):
        try:
            sentences.append(Sentence.from_text(line))
        except ValueError as err:
            raise ConfigError(f"{what} line {i + 1}: {err}") from err
    return sentences


def _report_model(report) -> ReportModel:
    return ReportModel(
        accuracy=report.accuracy, bleu=report.bleu, gm=report.gm, hm=report.hm, ppl=report.ppl
    )


def transfer(request: TransferRequest) -> TransferResponse:
    engine = _engine_for(request.config, request.config_dir)
    inputs = _parse_sentences(request.sentences, "input")
    outcome = run_corpus(inputs, engine)
    records = [
        SentenceRecordModel(
            index=r.index,
            input=r.input_text,
            output=r.output_text,
            stop_reason=r.stop_reason,
            steps_taken=r.steps_taken,
            objective=None if math.isnan(r.objective) else r.objective,
            transferred=r.transferred,
            error=r.error,
        )
        for r in outcome.report.records
    ]
    trace_lines: list[str] | None = None
    if request.want_trace:
        trace_lines = []
        for index, trace in enumerate(outcome.traces):
            for record in trace:
                trace_lines.append(json.dumps({"input_index": index, **record}, sort_keys=True))
    return TransferResponse(
        outputs=[s.text() for s in outcome.outputs],
        report=_report_model(outcome.report),
        records=records,
        trace=trace_lines,
    )


def evaluate(request: EvaluateRequest) -> EvaluateResponse:
    engine = _engine_for(request.config, request.config_dir)
    hypotheses = _parse_sentences(request.hypotheses, "hypothesis")
    if len(request.reference_sets) != len(hypotheses):
        raise ConfigError(
            f"{len(hypotheses)} hypotheses but {len(request.reference_sets)} reference sets"
        )
    reference_sets = [
        _parse_sentences(group, f"reference set {i + 1}")
        for i, group in enumerate(request.reference_sets)
    ]
    report = evaluate_outputs(hypotheses, reference_sets, engine)
    return EvaluateResponse(report=_report_model(report))


def train_lm(request: TrainLmRequest) -> TrainLmResponse:
    corpus = _parse_sentences(request.corpus, "corpus")
    lm = train_ngram(corpus, order=request.order, delta=request.delta)
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "model.nglm"
        lm.save(path)
        blob = path.read_bytes()
    return TrainLmResponse(
        model_b64=base64.b64encode(blob).decode("ascii"), vocab_size=lm.vocab_size
    )


def compare(request: CompareSearchRequest) -> CompareSearchResponse:
    engine = _engine_for(request.config, request.config_dir)
    inputs = _parse_sentences(request.sentences, "input")
    comparison = compare_search(inputs, engine, request.algos, seeds=request.seeds)
    return CompareSearchResponse(comparison=comparison)
