"""Command-line interface.

A thin client over the service layer: it reads and writes local files
and hands the actual work to the service operations, either in-process
(the default) or on a running server via ``--server URL``.  Exit codes:
0 success, 1 configuration error, 2 runtime/backend error.
"""

from __future__ import annotations

import argparse
import base64
import json
import sys
from pathlib import Path

import httpx
import pydantic

from .errors import ConfigError, StyleTransferError
from .service import ops
from .service.schemas import (
    CompareSearchRequest,
    CompareSearchResponse,
    EvaluateRequest,
    EvaluateResponse,
    TrainLmRequest,
    TrainLmResponse,
    TransferRequest,
    TransferResponse,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # bad flags are configuration errors -> exit 1
        raise ConfigError(message)


def _read_lines(path: str) -> list[str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read {path}: {err}") from err
    return [line for line in text.splitlines() if line.strip()]


def _read_config(path: str) -> tuple[str, str]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    return text, str(Path(path).resolve().parent)


def _write_text(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


class _Backend:
    """Executes service requests in-process or against a remote server."""

    def __init__(self, server: str | None):
        self.server = server

    def call(self, endpoint: str, request: pydantic.BaseModel, local, response_model):
        if self.server is None:
            return local(request)
        try:
            reply = httpx.post(
                f"{self.server.rstrip('/')}{endpoint}",
                content=request.model_dump_json(),
                headers={"content-type": "application/json"},
                timeout=600.0,
            )
        except httpx.HTTPError as err:
            raise StyleTransferError(f"server unreachable: {err}") from err
        if reply.status_code == 400:
            detail = reply.json().get("error", reply.text)
            raise ConfigError(detail)
        if reply.status_code >= 300:
            raise StyleTransferError(f"server error {reply.status_code}: {reply.text}")
        return response_model.model_validate_json(reply.content)


def _cmd_transfer(args, backend: _Backend) -> int:
    config_text, config_dir = _read_config(args.config)
    request = TransferRequest(
        sentences=_read_lines(args.input),
        config=config_text,
        config_dir=config_dir,
        want_trace=args.trace is not None,
    )
    response: TransferResponse = backend.call("/api/transfer", request, ops.transfer, TransferResponse)
    _write_text(args.output, "\n".join(response.outputs) + "\n")
    if args.trace is not None:
        _write_text(args.trace, "\n".join(response.trace or []) + "\n")
    report = response.report
    print(
        f"ACC {report.accuracy:.1f}  BLEU {report.bleu:.1f}  GM {report.gm:.1f}  "
        f"HM {report.hm:.1f}  PPL {report.ppl:.1f}"
    )
    return 0


def _cmd_evaluate(args, backend: _Backend) -> int:
    config_text, config_dir = _read_config(args.config)
    hypotheses = _read_lines(args.hyp)
    ref_files = [part for part in args.refs.split(",") if part]
    if not ref_files:
        raise ConfigError("--refs needs at least one file")
    columns = [_read_lines(path) for path in ref_files]
    for path, column in zip(ref_files, columns):
        if len(column) != len(hypotheses):
            raise ConfigError(
                f"{path}: {len(column)} references for {len(hypotheses)} hypotheses"
            )
    reference_sets = [[column[i] for column in columns] for i in range(len(hypotheses))]
    request = EvaluateRequest(
        hypotheses=hypotheses,
        reference_sets=reference_sets,
        config=config_text,
        config_dir=config_dir,
    )
    response: EvaluateResponse = backend.call("/api/evaluate", request, ops.evaluate, EvaluateResponse)
    report_json = json.dumps(response.report.model_dump(), indent=2, sort_keys=True)
    if args.report is not None:
        _write_text(args.report, report_json + "\n")
    report = response.report
    print(
        f"ACC {report.accuracy:.1f}  BLEU {report.bleu:.1f}  GM {report.gm:.1f}  "
        f"HM {report.hm:.1f}  PPL {report.ppl:.1f}"
    )
    return 0


def _cmd_train_lm(args, backend: _Backend) -> int:
    request = TrainLmRequest(corpus=_read_lines(args.corpus), order=args.order, delta=args.delta)
    response: TrainLmResponse = backend.call("/api/train-lm", request, ops.train_lm, TrainLmResponse)
    Path(args.out).write_bytes(base64.b64decode(response.model_b64))
    print(f"model written to {args.out} (vocabulary size {response.vocab_size})")
    return 0


def _cmd_compare_search(args, backend: _Backend) -> int:
    config_text, config_dir = _read_config(args.config)
    algos = [part for part in args.algos.split(",") if part]
    request = CompareSearchRequest(
        sentences=_read_lines(args.input),
        config=config_text,
        config_dir=config_dir,
        algos=algos,
        seeds=args.seeds,
    )
    response: CompareSearchResponse = backend.call(
        "/api/compare-search", request, ops.compare, CompareSearchResponse
    )
    _write_text(args.report, json.dumps(response.comparison, indent=2, sort_keys=True) + "\n")
    for algorithm, row in response.comparison["results"].items():
        print(
            f"{algorithm}: mean objective {row['mean_objective']:.6f}  "
            f"ACC {row['accuracy']:.1f}  mean steps {row['mean_steps']:.2f}"
        )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="styledit", description="edit-search text style transfer")
    parser.add_argument("--server", help="base URL of a running styledit service")
    commands = parser.add_subparsers(dest="command", required=True)

    transfer = commands.add_parser("transfer", help="rewrite a corpus of sentences")
    transfer.add_argument("--input", required=True)
    transfer.add_argument("--output", required=True)
    transfer.add_argument("--config", required=True)
    transfer.add_argument("--trace")
    transfer.set_defaults(handler=_cmd_transfer)

    evaluate = commands.add_parser("evaluate", help="score outputs against references")
    evaluate.add_argument("--hyp", required=True)
    evaluate.add_argument("--refs", required=True, help="comma-separated reference files")
    evaluate.add_argument("--config", required=True)
    evaluate.add_argument("--report")
    evaluate.set_defaults(handler=_cmd_evaluate)

    train = commands.add_parser("train-lm", help="train the n-gram fluency model")
    train.add_argument("--corpus", required=True)
    train.add_argument("--order", type=int, required=True)
    train.add_argument("--delta", type=float, required=True)
    train.add_argument("--out", required=True)
    train.set_defaults(handler=_cmd_train_lm)

    compare = commands.add_parser("compare-search", help="compare search algorithms")
    compare.add_argument("--algos", required=True, help="comma-separated: sahc,fchc,sa")
    compare.add_argument("--seeds", type=int, required=True)
    compare.add_argument("--input", required=True)
    compare.add_argument("--config", required=True)
    compare.add_argument("--report", required=True)
    compare.set_defaults(handler=_cmd_compare_search)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        backend = _Backend(args.server)
        return args.handler(args, backend)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 1
    except pydantic.ValidationError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 1
    except StyleTransferError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
