"""Core domain types and the composite search objective.

The objective is the product of three factors: a style ratio, a fluency
score, and a semantic-similarity score.  The factors are combined in log
space so that products of many small probabilities do not underflow;
the exposed values are exponentiated back to the linear scale.  All
scores are IEEE doubles so that argmax decisions are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol

from .errors import ScoringError

#: Lower clamp applied to probabilities and similarity bases.  Keeps
#: ratios finite and fractional powers real.
EPSILON = 1e-9


def _check_token(text: str) -> None:
    if not text:
        raise ValueError("token must be non-empty")
    if any(ch.isspace() for ch in text):
        raise ValueError(f"token may not contain whitespace: {text!r}")


@dataclass(frozen=True)
class Sentence:
    """An ordered, non-empty sequence of whitespace-free tokens.

    Immutable: instances can be shared freely across threads.
    """

    tokens: tuple[str, ...]

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("sentence must contain at least one token")
        for tok in self.tokens:
            _check_token(tok)

    @classmethod
    def from_text(cls, text: str) -> "Sentence":
        """Split a whitespace-pretokenized line into a sentence."""
        return cls(tuple(text.split()))

    @classmethod
    def _trusted(cls, tokens: tuple[str, ...]) -> "Sentence":
        """Construct without re-validating; the caller guarantees every
        token already satisfies the invariants.  Used on the edit hot
        path where all tokens come from validated sentences."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "tokens", tokens)
        return obj

    def text(self) -> str:
        return " ".join(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self):
        return iter(self.tokens)


@dataclass(frozen=True)
class StyleTask:
    """A transfer direction: rewrite ``source_style`` text as ``target_style``.

    ``task_word`` is the attribute being changed (e.g. "sentiment",
    "formality") and appears verbatim in classifier prompts.
    """

    task_word: str
    source_style: str
    target_style: str

    def __post_init__(self):
        if not self.task_word or not self.source_style or not self.target_style:
            raise ValueError("task_word and both style words must be non-empty")
        if self.source_style == self.target_style:
            raise ValueError("source and target styles must differ")

    def reversed(self) -> "StyleTask":
        return StyleTask(self.task_word, self.target_style, self.source_style)


@dataclass(frozen=True)
class Weights:
    """Exponents balancing fluency (alpha) and the word/sentence semantic
    similarities (beta, gamma) against the style ratio."""

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        for name in ("alpha", "beta", "gamma"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")


@dataclass(frozen=True)
class ScoreBreakdown:
    """Per-scorer values and their product.

    Invariants: ``f_total == f_sty * f_flu * f_sem`` and
    ``f_sem == f_word**beta * f_sent**gamma`` (both up to 1e-12 relative
    error; the second is guaranteed by the :func:`composite_score`
    construction path).
    """

    f_sty: float
    f_flu: float
    f_word: float
    f_sent: float
    f_sem: float
    f_total: float

    def __post_init__(self):
        for name in ("f_sty", "f_flu", "f_word", "f_sent", "f_sem", "f_total"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.f_sty <= 0:
            raise ValueError(f"f_sty must be positive, got {self.f_sty!r}")
        if not 0 < self.f_flu <= 1:
            raise ValueError(f"f_flu must lie in (0, 1], got {self.f_flu!r}")
        for name in ("f_word", "f_sent", "f_sem"):
            value = getattr(self, name)
            if not 0 <= value <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
        if self.f_total < 0:
            raise ValueError(f"f_total must be non-negative, got {self.f_total!r}")
        product = self.f_sty * self.f_flu * self.f_sem
        if not math.isclose(self.f_total, product, rel_tol=1e-12, abs_tol=1e-300):
            raise ValueError(
                f"f_total {self.f_total!r} inconsistent with factor product {product!r}"
            )

    def as_dict(self) -> dict[str, float]:
        return {
            "f_sty": self.f_sty,
            "f_flu": self.f_flu,
            "f_word": self.f_word,
            "f_sent": self.f_sent,
            "f_sem": self.f_sem,
            "f_total": self.f_total,
        }


class StyleScorer(Protocol):
    def style_ratio(self, y: Sentence) -> float:
        """Ratio of target-style to source-style probability; > 1 means
        the backend believes the target style dominates."""
        ...


class FluencyScorer(Protocol):
    def mean_logprob(self, y: Sentence) -> float:
        """Mean per-token log probability of ``y`` under the backend LM."""
        ...


class SemanticScorer(Protocol):
    def similarity(self, y: Sentence, x: Sentence) -> tuple[float, float]:
        """Word-level and sentence-level similarity of ``y`` to ``x``,
        each in [0, 1]."""
        ...


@dataclass(frozen=True)
class ScorerBundle:
    """The three scorer backends the objective is built from."""

    style: StyleScorer
    fluency: FluencyScorer
    semantic: SemanticScorer


def _call(component: str, fn, *args):
    try:
        return fn(*args)
    except ScoringError as err:
        if err.component is None:
            err.component = component
        raise
    except Exception as err:  # backend bug or I/O failure
        raise ScoringError(f"{component} backend failed: {err}", component=component) from err


def clamp_unit(value: float, floor: float = EPSILON) -> float:
    """Clamp a similarity/probability to [floor, 1]."""
    return min(max(value, floor), 1.0)


def composite_score(
    x: Sentence, y: Sentence, scorers: ScorerBundle, weights: Weights
) -> ScoreBreakdown:
    """Score candidate ``y`` against source ``x``.

    Deterministic for fixed inputs and backends; reentrant.  Backend
    failures surface as :class:`ScoringError` carrying the failing
    component's name.  Word- and sentence-level similarities are clamped
    to [1e-9, 1] before exponentiation so fractional powers stay real.
    """
    f_sty = _call("style", scorers.style.style_ratio, y)
    if not (math.isfinite(f_sty) and f_sty > 0):
        raise ScoringError(f"style backend returned invalid ratio {f_sty!r}", component="style")
    mean_lp = _call("fluency", scorers.fluency.mean_logprob, y)
    if not math.isfinite(mean_lp) or mean_lp > 0:
        raise ScoringError(
            f"fluency backend returned invalid mean log-probability {mean_lp!r}",
            component="fluency",
        )
    f_word_raw, f_sent_raw = _call("semantic", scorers.semantic.similarity, y, x)

    f_word = clamp_unit(f_word_raw)
    f_sent = clamp_unit(f_sent_raw)
    log_flu = weights.alpha * mean_lp
    log_sem = weights.beta * math.log(f_word) + weights.gamma * math.log(f_sent)
    log_total = math.log(f_sty) + log_flu + log_sem
    return ScoreBreakdown(
        f_sty=f_sty,
        f_flu=math.exp(log_flu),
        f_word=f_word,
        f_sent=f_sent,
        f_sem=math.exp(log_sem),
        f_total=math.exp(log_total),
    )
