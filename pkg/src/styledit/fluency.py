"""Fluency scoring over a token-level language model.

The desk-scale backend is an interpolated additive-smoothed n-gram
model; a remote backend can substitute a neural LM through the wire
protocol.  The fluency score is the geometric mean of per-token
probabilities raised to a weighting exponent; the module also provides
corpus perplexity as an evaluation metric.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Sequence

from .core import Sentence
from .errors import ConfigError

if TYPE_CHECKING:  # pragma: no cover
    from .protocol import ScorerClient

#: Reserved symbols.  BOS pads contexts and is never emitted; EOS is an
#: emission event; unknown tokens map to UNK at scoring time.
BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"

_MAGIC = b"NGLM1"


@dataclass(frozen=True)
class TokenLogProbs:
    """One log probability per scored token; all finite and <= 0."""

    values: tuple[float, ...]

    def __post_init__(self):
        if not self.values:
            raise ValueError("token log-probabilities must be non-empty")
        for value in self.values:
            if not math.isfinite(value) or value > 0:
                raise ValueError(f"log probability must be finite and <= 0, got {value!r}")

    def mean(self) -> float:
        return sum(self.values) / len(self.values)

    def __len__(self) -> int:
        return len(self.values)


class NgramLM:
    """Additive-smoothed n-gram LM with recursive interpolation.

    For context length k > 0:

        P_k(w | ctx) = (c(ctx, w) + d_k * V * P_{k-1}(w | ctx[1:]))
                       / (c(ctx) + d_k * V)

    and at the unigram level P_0(w) = (c(w) + d_0) / (N + d_0 * V),
    where V counts the emission vocabulary (corpus tokens plus EOS and
    UNK; BOS only pads contexts).  Every next-token distribution sums to
    one and every probability is strictly positive.  Instances are
    immutable after construction and safe to share across threads.
    """

    def __init__(
        self,
        order: int,
        deltas: Sequence[float],
        vocab: Iterable[str],
        counts: Sequence[dict[tuple[str, ...], dict[str, int]]],
    ):
        if order < 1:
            raise ConfigError(f"order must be >= 1, got {order}")
        if len(deltas) != order:
            raise ConfigError("need one smoothing constant per n-gram level")
        for delta in deltas:
            if not (0 < delta <= 1):
                raise ConfigError(f"smoothing constant must lie in (0, 1], got {delta}")
        if len(counts) != order:
            raise ConfigError("need one count table per n-gram level")
        self.order = order
        self.deltas = tuple(float(d) for d in deltas)
        self.vocab = frozenset(vocab) | {EOS, UNK}
        self._counts = [dict(level) for level in counts]
        self._totals = [
            {ctx: sum(words.values()) for ctx, words in level.items()} for level in self._counts
        ]
        self._unigrams = self._counts[0].get((), {})
        self._n_events = self._totals[0].get((), 0)

    @property
    def vocab_size(self) -> int:
        return len(self.vocab)

    def unigram_counts(self) -> dict[str, int]:
        """Raw unigram emission counts (includes EOS, excludes BOS)."""
        return dict(self._unigrams)

    def _normalize_context(self, context: Sequence[str]) -> tuple[str, ...]:
        return tuple(t if (t == BOS or t in self.vocab) else UNK for t in context)

    def prob(self, word: str, context: Sequence[str]) -> float:
        """P(word | last order-1 context tokens), BOS-padded."""
        w = word if word in self.vocab else UNK
        v = self.vocab_size
        p = (self._unigrams.get(w, 0) + self.deltas[0]) / (self._n_events + self.deltas[0] * v)
        if self.order == 1:
            return p
        ctx = self._normalize_context(context[-(self.order - 1):] if context else ())
        for k in range(1, min(len(ctx), self.order - 1) + 1):
            sub = ctx[len(ctx) - k:]
            total = self._totals[k].get(sub)
            if total is None:
                continue  # unseen context: level reduces to the lower-order estimate
            count = self._counts[k].get(sub, {}).get(w, 0)
            dv = self.deltas[k] * v
            p = (count + dv * p) / (total + dv)
        return p

    def logprob(self, word: str, context: Sequence[str]) -> float:
        return math.log(self.prob(word, context))

    def save(self, path: str | Path) -> None:
        """Write the versioned binary model file (magic ``NGLM1``)."""
        tokens = sorted(self.vocab)
        index = {tok: i for i, tok in enumerate(tokens)}
        index[BOS] = len(tokens)
        out = bytearray()
        out += _MAGIC
        out += struct.pack("<I", self.order)
        out += struct.pack(f"<{self.order}d", *self.deltas)
        out += struct.pack("<I", len(tokens))
        for tok in tokens:
            raw = tok.encode("utf-8")
            out += struct.pack("<H", len(raw)) + raw
        for k in range(self.order):
            level = self._counts[k]
            contexts = sorted(level, key=lambda ctx: tuple(index[t] for t in ctx))
            out += struct.pack("<Q", len(contexts))
            for ctx in contexts:
                for tok in ctx:
                    out += struct.pack("<I", index[tok])
                words = level[ctx]
                out += struct.pack("<I", len(words))
                for word in sorted(words, key=lambda w: index[w]):
                    out += struct.pack("<IQ", index[word], words[word])
        Path(path).write_bytes(bytes(out))

    @classmethod
    def load(cls, path: str | Path) -> "NgramLM":
        try:
            blob = Path(path).read_bytes()
        except OSError as err:
            raise ConfigError(f"cannot read model {path}: {err}") from err
        reader = _Reader(blob, path)
        magic = reader.take(len(_MAGIC))
        if magic != _MAGIC:
            raise ConfigError(f"{path}: not a NGLM1 model file (magic {magic!r})")
        (order,) = reader.unpack("<I")
        if order < 1:
            raise ConfigError(f"{path}: invalid order {order}")
        deltas = reader.unpack(f"<{order}d")
        (n_tokens,) = reader.unpack("<I")
        tokens: list[str] = []
        for _ in range(n_tokens):
            (length,) = reader.unpack("<H")
            tokens.append(reader.take(length).decode("utf-8"))
        lookup = list(tokens) + [BOS]
        counts: list[dict[tuple[str, ...], dict[str, int]]] = []
        for k in range(order):
            (n_contexts,) = reader.unpack("<Q")
            level: dict[tuple[str, ...], dict[str, int]] = {}
            for _ in range(n_contexts):
                ctx = tuple(lookup[i] for i in reader.unpack(f"<{k}I")) if k else ()
                (n_words,) = reader.unpack("<I")
                words: dict[str, int] = {}
                for _ in range(n_words):
                    idx, count = reader.unpack("<IQ")
                    words[lookup[idx]] = count
                level[ctx] = words
            counts.append(level)
        reader.expect_end()
        return cls(order=order, deltas=deltas, vocab=tokens, counts=counts)


class _Reader:
    def __init__(self, blob: bytes, path):
        self._blob = blob
        self._pos = 0
        self._path = path

    def take(self, n: int) -> bytes:
        if self._pos + n > len(self._blob):
            raise ConfigError(f"{self._path}: truncated model file")
        chunk = self._blob[self._pos : self._pos + n]
        self._pos += n
        return chunk

    def unpack(self, fmt: str):
        size = struct.calcsize(fmt)
        return struct.unpack(fmt, self.take(size))

    def expect_end(self) -> None:
        if self._pos != len(self._blob):
            raise ConfigError(f"{self._path}: trailing bytes in model file")


def train_ngram(corpus: Sequence[Sentence], order: int, delta: float) -> NgramLM:
    """Count n-grams of every level up to ``order`` over the corpus.

    Each sentence contributes its tokens plus one EOS event; contexts
    are BOS-padded.  Retraining on identical input is bit-identical.
    """
    if not corpus:
        raise ConfigError("training corpus must be non-empty")
    if order < 1:
        raise ConfigError(f"order must be >= 1, got {order}")
    if not (0 < delta <= 1):
        raise ConfigError(f"delta must lie in (0, 1], got {delta}")
    counts: list[dict[tuple[str, ...], dict[str, int]]] = [{} for _ in range(order)]
    vocab: set[str] = set()
    for sentence in corpus:
        tokens = list(sentence.tokens)
        vocab.update(tokens)
        history = [BOS] * (order - 1) + tokens
        events = tokens + [EOS]
        for j, event in enumerate(events):
            full_ctx = tuple(history[j : j + order - 1])
            for k in range(order):
                ctx = full_ctx[len(full_ctx) - k:] if k else ()
                bucket = counts[k].setdefault(ctx, {})
                bucket[event] = bucket.get(event, 0) + 1
    return NgramLM(order=order, deltas=[delta] * order, vocab=vocab, counts=counts)


def token_logprobs(lm: NgramLM, y: Sentence) -> TokenLogProbs:
    """log P(y_i | y_{<i}) per position, BOS-padded, OOV mapped to UNK."""
    context = [BOS] * (lm.order - 1)
    values = []
    for token in y.tokens:
        values.append(lm.logprob(token, context))
        if lm.order > 1:
            context = context[1:] + [token]
    return TokenLogProbs(tuple(values))


def fluency_score(logprobs: TokenLogProbs, alpha: float) -> float:
    """Geometric mean of token probabilities raised to ``alpha``.

    Always in (0, 1]; equal to 1 when alpha is 0.
    """
    if alpha < 0:
        raise ValueError(f"alpha must be >= 0, got {alpha}")
    return math.exp(alpha * logprobs.mean())


def perplexity(lm: NgramLM, corpus: Sequence[Sentence]) -> float:
    """Corpus-level perplexity, EOS included in both the log-probability
    sum and the token count."""
    if not corpus:
        raise ConfigError("perplexity needs a non-empty corpus")
    total_logprob = 0.0
    total_tokens = 0
    for sentence in corpus:
        context = [BOS] * (lm.order - 1)
        for token in sentence.tokens:
            total_logprob += lm.logprob(token, context)
            if lm.order > 1:
                context = context[1:] + [token]
        total_logprob += lm.logprob(EOS, context)
        total_tokens += len(sentence) + 1
    return math.exp(-total_logprob / total_tokens)


class NgramFluencyScorer:
    """Adapter exposing an n-gram model as the objective's fluency factor."""

    def __init__(self, lm: NgramLM):
        self.lm = lm

    def token_logprobs(self, y: Sentence) -> TokenLogProbs:
        return token_logprobs(self.lm, y)

    def mean_logprob(self, y: Sentence) -> float:
        return token_logprobs(self.lm, y).mean()


class RemoteFluencyScorer:
    """Fetches per-token log probabilities from a remote scorer."""

    def __init__(self, client: "ScorerClient"):
        self._client = client

    def token_logprobs(self, y: Sentence) -> TokenLogProbs:
        return TokenLogProbs(tuple(self._client.logprobs(y.tokens)))

    def mean_logprob(self, y: Sentence) -> float:
        return self.token_logprobs(y).mean()
