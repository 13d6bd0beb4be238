"""Prompt construction and style scoring over interchangeable backends.

A style backend turns a candidate sentence into probabilities of the two
style words.  The score is their ratio: values above 1 mean the backend
believes the candidate already reads as the target style.  Two backends
ship here: a transparent naive-Bayes lexicon for desk-scale runs, and a
remote backend that queries a hosted language model through the wire
protocol of :mod:`styledit.protocol`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import TYPE_CHECKING, Mapping, Protocol, Sequence

from .core import EPSILON, Sentence, StyleTask, clamp_unit
from .errors import ConfigError

if TYPE_CHECKING:  # pragma: no cover
    from .protocol import ScorerClient


@dataclass(frozen=True)
class PromptText:
    """A classification prompt; the candidate sits between the outermost
    braces and the text ends with a colon."""

    text: str


def build_prompt(task: StyleTask, y: Sentence) -> PromptText:
    """Render the classifier prompt for candidate ``y``.

    Exact format: ``The <task_word> of the text { <tokens joined by
    single spaces> } is :`` — single spaces around the brace markers and
    before the colon.  Tokens pass through verbatim, including ones that
    themselves contain braces.
    """
    return PromptText(f"The {task.task_word} of the text {{ {y.text()} }} is :")


@dataclass(frozen=True)
class StyleProbabilities:
    """Backend probabilities of the source and target style words,
    clamped to [1e-9, 1]."""

    p_source: float
    p_target: float

    def __post_init__(self):
        for name in ("p_source", "p_target"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, clamp_unit(value))


class StyleBackend(Protocol):
    def style_probabilities(self, y: Sentence, task: StyleTask) -> StyleProbabilities: ...


@dataclass(frozen=True)
class StyleLexicon:
    """Token -> (label, weight) map with per-label priors.

    A desk-scale stand-in for a prompted classifier: labels are the
    style words themselves, weights are positive pseudo-counts.
    """

    entries: Mapping[str, tuple[str, float]]
    priors: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not self.entries:
            raise ConfigError("style lexicon has no entries")
        labels = {label for label, _ in self.entries.values()}
        for token, (label, weight) in self.entries.items():
            if not (math.isfinite(weight) and weight > 0):
                raise ConfigError(f"lexicon weight for {token!r} must be positive")
        priors = dict(self.priors) or {label: 1.0 for label in labels}
        for label, prior in priors.items():
            if not (math.isfinite(prior) and prior > 0):
                raise ConfigError(f"lexicon prior for {label!r} must be positive")
        missing = labels - set(priors)
        if missing:
            raise ConfigError(f"lexicon priors missing labels: {sorted(missing)}")
        object.__setattr__(self, "priors", priors)

    @property
    def labels(self) -> frozenset[str]:
        return frozenset(label for label, _ in self.entries.values())

    @classmethod
    def load(cls, path: str | Path) -> "StyleLexicon":
        """Read a lexicon file: one ``token<TAB>label<TAB>weight`` entry
        per line, UTF-8, lines starting with ``#`` ignored."""
        entries: dict[str, tuple[str, float]] = {}
        try:
            raw = Path(path).read_text(encoding="utf-8")
        except OSError as err:
            raise ConfigError(f"cannot read lexicon {path}: {err}") from err
        for lineno, line in enumerate(raw.splitlines(), start=1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ConfigError(f"{path}:{lineno}: expected token<TAB>label<TAB>weight")
            token, label, weight_text = parts[0].strip(), parts[1].strip(), parts[2].strip()
            if not token or not label:
                raise ConfigError(f"{path}:{lineno}: empty token or label")
            try:
                weight = float(weight_text)
            except ValueError as err:
                raise ConfigError(f"{path}:{lineno}: bad weight {weight_text!r}") from err
            entries[token] = (label, weight)
        return cls(entries=entries)


class LexiconBackend:
    """Naive Bayes over lexicon tokens present in the sentence.

    score(label) = prior(label) * prod P(token | label) with add-one
    smoothing over the lexicon vocabulary, normalized over the two
    labels of the task.  Tokens outside the lexicon are ignored; each
    occurrence of a lexicon token counts.
    """

    def __init__(self, lexicon: StyleLexicon):
        self._lexicon = lexicon
        self._vocab_size = len(lexicon.entries)
        totals: dict[str, float] = {}
        for label, weight in lexicon.entries.values():
            totals[label] = totals.get(label, 0.0) + weight
        self._totals = totals

    def _check_label(self, label: str) -> None:
        if label not in self._lexicon.priors or label not in self._totals:
            raise ConfigError(f"style word {label!r} unknown to the lexicon backend")

    def style_probabilities(self, y: Sentence, task: StyleTask) -> StyleProbabilities:
        labels = (task.source_style, task.target_style)
        for label in labels:
            self._check_label(label)
        log_scores = [math.log(self._lexicon.priors[label]) for label in labels]
        entries = self._lexicon.entries
        for token in y.tokens:
            entry = entries.get(token)
            if entry is None:
                continue
            token_label, weight = entry
            for i, label in enumerate(labels):
                count = weight if token_label == label else 0.0
                log_scores[i] += math.log(
                    (count + 1.0) / (self._totals[label] + self._vocab_size)
                )
        peak = max(log_scores)
        raw = [math.exp(score - peak) for score in log_scores]
        norm = raw[0] + raw[1]
        return StyleProbabilities(p_source=raw[0] / norm, p_target=raw[1] / norm)


class RemoteStyleBackend:
    """Queries a hosted language model with the classification prompt.

    Server-provided probabilities pass through unchanged apart from the
    standard [1e-9, 1] clamp.  Optional exemplars are forwarded for the
    server to prepend; the engine itself stays exemplar-agnostic.
    """

    def __init__(self, client: "ScorerClient", exemplars: Sequence[str] | None = None):
        self._client = client
        self._exemplars = tuple(exemplars) if exemplars else None

    def style_probabilities(self, y: Sentence, task: StyleTask) -> StyleProbabilities:
        prompt = build_prompt(task, y)
        p_source, p_target = self._client.style(
            prompt.text, (task.source_style, task.target_style), exemplars=self._exemplars
        )
        return StyleProbabilities(p_source=p_source, p_target=p_target)


def style_probabilities(y: Sentence, task: StyleTask, backend: StyleBackend) -> StyleProbabilities:
    """Probabilities of the two style words under the backend."""
    return backend.style_probabilities(y, task)


def style_score(y: Sentence, task: StyleTask, backend: StyleBackend) -> float:
    """Ratio p(target) / p(source); the decision boundary is 1."""
    probs = backend.style_probabilities(y, task)
    return probs.p_target / probs.p_source


def is_transferred(y: Sentence, task: StyleTask, backend: StyleBackend) -> bool:
    """True iff the backend strictly favours the target style."""
    return style_score(y, task, backend) > 1.0


class StyleRatioScorer:
    """Adapter exposing a backend as the objective's style factor."""

    def __init__(self, backend: StyleBackend, task: StyleTask):
        self._backend = backend
        self._task = task

    def style_ratio(self, y: Sentence) -> float:
        return style_score(y, self._task, self._backend)


__all__ = [
    "PromptText",
    "StyleProbabilities",
    "StyleLexicon",
    "StyleBackend",
    "LexiconBackend",
    "RemoteStyleBackend",
    "StyleRatioScorer",
    "build_prompt",
    "style_probabilities",
    "style_score",
    "is_transferred",
    "EPSILON",
]
