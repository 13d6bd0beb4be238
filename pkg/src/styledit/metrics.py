"""Corpus-level evaluation metrics.

BLEU follows the classic multi-bleu conventions: orders 1-4 with
uniform weights, counts clipped against the best-matching reference,
closest-reference-length brevity penalty, no smoothing (a zero
precision at any order zeroes the score).  Transfer accuracy asks a
held-out classifier whether each output reads as the target style.
GM/HM combine the two on the 0-100 scale.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

from .core import Sentence, StyleTask
from .errors import ConfigError
from .style import StyleBackend, is_transferred


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu4(
    hypotheses: Sequence[Sentence], reference_sets: Sequence[Sequence[Sentence]]
) -> float:
    """Corpus BLEU-4 on the 0-100 scale."""
    if len(hypotheses) != len(reference_sets):
        raise ConfigError(
            f"{len(hypotheses)} hypotheses but {len(reference_sets)} reference sets"
        )
    if not hypotheses:
        raise ConfigError("BLEU needs at least one hypothesis")
    correct = [0] * 5
    total = [0] * 5
    hyp_length = 0
    ref_length = 0
    for hypothesis, references in zip(hypotheses, reference_sets):
        if not references:
            raise ConfigError("every hypothesis needs at least one reference")
        tokens = hypothesis.tokens
        hyp_length += len(tokens)
        # Closest reference length; ties prefer the shorter reference.
        closest = min(references, key=lambda ref: (abs(len(ref) - len(tokens)), len(ref)))
        ref_length += len(closest)
        for n in range(1, 5):
            hyp_counts = _ngrams(tokens, n)
            if not hyp_counts:
                continue
            max_ref: Counter = Counter()
            for reference in references:
                for gram, count in _ngrams(reference.tokens, n).items():
                    if count > max_ref[gram]:
                        max_ref[gram] = count
            total[n] += sum(hyp_counts.values())
            correct[n] += sum(min(count, max_ref[gram]) for gram, count in hyp_counts.items())
    precisions = [correct[n] / total[n] if total[n] else 0.0 for n in range(1, 5)]
    if any(p == 0.0 for p in precisions):
        return 0.0
    brevity = 1.0
    if hyp_length < ref_length:
        brevity = math.exp(1.0 - ref_length / hyp_length)
    return 100.0 * brevity * math.exp(sum(math.log(p) for p in precisions) / 4.0)


def transfer_accuracy(
    outputs: Sequence[Sentence], task: StyleTask, eval_classifier: StyleBackend
) -> float:
    """Percentage of outputs the classifier assigns to the target style.

    The classifier should be distinct from the search-time style backend
    so the engine does not grade itself.
    """
    if not outputs:
        raise ConfigError("transfer accuracy needs at least one output")
    hits = sum(1 for y in outputs if is_transferred(y, task, eval_classifier))
    return 100.0 * hits / len(outputs)


def means(accuracy: float, bleu: float) -> tuple[float, float]:
    """Geometric and harmonic mean of accuracy and BLEU (both 0-100),
    reported to one decimal.  The harmonic mean of (0, 0) is 0."""
    if accuracy < 0 or bleu < 0:
        raise ValueError("means need non-negative inputs")
    gm = math.sqrt(accuracy * bleu)
    hm = 0.0 if accuracy + bleu == 0 else 2.0 * accuracy * bleu / (accuracy + bleu)
    return round(gm, 1), round(hm, 1)


@dataclass(frozen=True)
class SentenceOutcome:
    """Per-sentence record of a corpus run."""

    index: int
    input_text: str
    output_text: str
    stop_reason: str
    steps_taken: int
    objective: float
    transferred: bool
    error: str | None = None

    def as_dict(self) -> dict:
        return {
            "index": self.index,
            "input": self.input_text,
            "output": self.output_text,
            "stop_reason": self.stop_reason,
            "steps_taken": self.steps_taken,
            "objective": self.objective,
            "transferred": self.transferred,
            "error": self.error,
        }


@dataclass(frozen=True)
class EvalReport:
    """Corpus metrics: accuracy and BLEU on 0-100, their geometric and
    harmonic means (one decimal), output perplexity, and the
    per-sentence records."""

    accuracy: float
    bleu: float
    gm: float
    hm: float
    ppl: float
    records: tuple[SentenceOutcome, ...] = field(default_factory=tuple)

    def as_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "bleu": self.bleu,
            "gm": self.gm,
            "hm": self.hm,
            "ppl": self.ppl,
            "records": [record.as_dict() for record in self.records],
        }

    def summary(self) -> str:
        return (
            f"ACC {self.accuracy:.1f}  BLEU {self.bleu:.1f}  "
            f"GM {self.gm:.1f}  HM {self.hm:.1f}  PPL {self.ppl:.1f}"
        )
