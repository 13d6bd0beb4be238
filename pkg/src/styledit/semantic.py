"""Semantic similarity scoring: keyword extraction, word-level min-max
similarity, and sentence-level cosine over an embedding provider.

Keywords come from the source sentence via RAKE: split at stopwords and
punctuation, score words by co-occurrence degree/frequency, rank the
phrases.  The word-level score is the worst best-match cosine over the
keywords; the sentence-level score is the cosine of pooled sentence
vectors.  Both are clamped to non-negative values before use as
fractional-power bases.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Protocol

import numpy as np

from .core import EPSILON, Sentence
from .errors import ConfigError, ScoringError

if TYPE_CHECKING:  # pragma: no cover
    from .protocol import ScorerClient


@dataclass(frozen=True)
class KeywordSet:
    """Deduplicated keywords in source-sentence order."""

    keywords: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.keywords)) != len(self.keywords):
            raise ValueError("keywords must be deduplicated")

    def __len__(self) -> int:
        return len(self.keywords)

    def __bool__(self) -> bool:
        return bool(self.keywords)


def load_stopwords(path: str | Path) -> frozenset[str]:
    """One token per line, UTF-8; blank lines ignored."""
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read stopword file {path}: {err}") from err
    return frozenset(line.strip() for line in raw.splitlines() if line.strip())


def _is_delimiter(token: str, stopwords: frozenset[str] | set[str]) -> bool:
    # Punctuation tokens (no alphanumeric characters) split phrases too.
    return token in stopwords or all(not ch.isalnum() for ch in token)


def extract_keywords(
    x: Sentence, stopwords: frozenset[str] | set[str] = frozenset(), max_keywords: int = 10
) -> KeywordSet:
    """RAKE keyword extraction over a single sentence.

    Candidate phrases are maximal runs of non-delimiter tokens; a word
    scores degree/frequency on the phrase co-occurrence graph and a
    phrase scores the sum of its word scores.  Member words of the
    top-scoring phrases are returned as single tokens, deduplicated,
    capped at ``max_keywords``, presented in source order.  Phrase-score
    ties break toward the earlier phrase.  An all-stopword sentence
    yields an empty keyword set.
    """
    if max_keywords < 0:
        raise ValueError(f"max_keywords must be >= 0, got {max_keywords}")
    phrases: list[tuple[int, tuple[str, ...]]] = []
    current: list[str] = []
    start = 0
    for i, token in enumerate(x.tokens):
        if _is_delimiter(token, stopwords):
            if current:
                phrases.append((start, tuple(current)))
                current = []
        else:
            if not current:
                start = i
            current.append(token)
    if current:
        phrases.append((start, tuple(current)))
    if not phrases or max_keywords == 0:
        return KeywordSet(())

    freq: dict[str, int] = {}
    degree: dict[str, int] = {}
    for _, words in phrases:
        for word in words:
            freq[word] = freq.get(word, 0) + 1
            degree[word] = degree.get(word, 0) + len(words)
    word_score = {word: degree[word] / freq[word] for word in freq}

    ranked = sorted(
        phrases, key=lambda item: (-sum(word_score[w] for w in item[1]), item[0])
    )
    selected: list[str] = []
    for _, words in ranked:
        for word in words:
            if word not in selected:
                selected.append(word)
        if len(selected) >= max_keywords:
            break
    selected = selected[:max_keywords]

    first_index: dict[str, int] = {}
    for i, token in enumerate(x.tokens):
        first_index.setdefault(token, i)
    selected.sort(key=lambda w: first_index[w])
    return KeywordSet(tuple(selected))


class EmbeddingProvider(Protocol):
    dimension: int
    contextual: bool

    def token_units(self, s: Sentence) -> list[np.ndarray]:
        """Unit-norm vector per token; the zero vector marks an unknown
        token (its cosines then come out as 0)."""
        ...

    def sentence_vector(self, s: Sentence) -> np.ndarray:
        """Pooled (unnormalized) sentence vector."""
        ...


class StaticEmbeddings:
    """Context-free word vectors loaded from a text file.

    File format: one entry per line, the token followed by ``dimension``
    whitespace-separated decimal floats.  The sentence vector is the
    arithmetic mean of the known token vectors.
    """

    contextual = False

    def __init__(self, vectors: dict[str, np.ndarray]):
        if not vectors:
            raise ConfigError("embedding table is empty")
        dims = {len(v) for v in vectors.values()}
        if len(dims) != 1:
            raise ConfigError(f"inconsistent embedding dimensions: {sorted(dims)}")
        self.dimension = dims.pop()
        # Lexicographic token order keeps neighbor ranking deterministic.
        self._tokens = tuple(sorted(vectors))
        self._index = {tok: i for i, tok in enumerate(self._tokens)}
        self._raw = np.stack([np.asarray(vectors[t], dtype=np.float64) for t in self._tokens])
        if not np.isfinite(self._raw).all():
            raise ConfigError("embedding table contains non-finite values")
        norms = np.linalg.norm(self._raw, axis=1, keepdims=True)
        safe = np.where(norms == 0.0, 1.0, norms)
        self._units = self._raw / safe
        self._zero = np.zeros(self.dimension)

    @classmethod
    def load(cls, path: str | Path) -> "StaticEmbeddings":
        vectors: dict[str, np.ndarray] = {}
        try:
            raw = Path(path).read_text(encoding="utf-8")
        except OSError as err:
            raise ConfigError(f"cannot read embeddings {path}: {err}") from err
        dimension: int | None = None
        for lineno, line in enumerate(raw.splitlines(), start=1):
            if not line.strip():
                continue
            parts = line.split()
            if dimension is None:
                dimension = len(parts) - 1
                if dimension < 1:
                    raise ConfigError(f"{path}:{lineno}: no vector components")
            if len(parts) != dimension + 1:
                raise ConfigError(
                    f"{path}:{lineno}: expected {dimension} components, got {len(parts) - 1}"
                )
            try:
                vectors[parts[0]] = np.array([float(v) for v in parts[1:]], dtype=np.float64)
            except ValueError as err:
                raise ConfigError(f"{path}:{lineno}: bad float: {err}") from err
        return cls(vectors)

    @property
    def tokens(self) -> tuple[str, ...]:
        return self._tokens

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def unit(self, token: str) -> np.ndarray:
        i = self._index.get(token)
        return self._zero if i is None else self._units[i]

    def token_units(self, s: Sentence) -> list[np.ndarray]:
        return [self.unit(t) for t in s.tokens]

    def sentence_vector(self, s: Sentence) -> np.ndarray:
        rows = [self._raw[self._index[t]] for t in s.tokens if t in self._index]
        if not rows:
            raise ScoringError(
                f"no embedded tokens in sentence {s.text()!r}", component="semantic"
            )
        return np.mean(rows, axis=0)

    def neighbors(self, token: str, k: int, exclude: frozenset[str] = frozenset()) -> tuple[str, ...]:
        """Top-k vocabulary tokens by cosine to ``token``; unknown anchors
        have no neighbors.  Cosine ties break lexicographically."""
        i = self._index.get(token)
        if i is None or k <= 0:
            return ()
        sims = self._units @ self._units[i]
        order = np.argsort(-sims, kind="stable")  # tokens pre-sorted, so ties stay lexicographic
        picked: list[str] = []
        for j in order:
            candidate = self._tokens[j]
            if candidate == token or candidate in exclude:
                continue
            picked.append(candidate)
            if len(picked) == k:
                break
        return tuple(picked)


class RemoteEmbeddings:
    """Contextual vectors fetched from a remote encoder.

    One request per distinct sentence serves both the per-token vectors
    and the pooled sentence vector; responses are cached because search
    re-scores the same source sentence against many candidates.
    """

    contextual = True

    def __init__(self, client: "ScorerClient", cache_size: int = 4096):
        self._client = client
        self._cache: dict[tuple[str, ...], tuple[list[np.ndarray], np.ndarray]] = {}
        self._cache_size = cache_size
        self.dimension = 0  # learned from the first response

    def _fetch(self, s: Sentence) -> tuple[list[np.ndarray], np.ndarray]:
        key = s.tokens
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        token_vecs, sentence_vec = self._client.embed(s.tokens)
        if self.dimension == 0:
            self.dimension = len(sentence_vec)
        units = []
        for vec in token_vecs:
            norm = float(np.linalg.norm(vec))
            units.append(vec / norm if norm > 0 else np.zeros(len(vec)))
        entry = (units, np.asarray(sentence_vec, dtype=np.float64))
        if len(self._cache) >= self._cache_size:
            self._cache.clear()
        self._cache[key] = entry
        return entry

    def token_units(self, s: Sentence) -> list[np.ndarray]:
        return self._fetch(s)[0]

    def sentence_vector(self, s: Sentence) -> np.ndarray:
        return self._fetch(s)[1]


def _clamped_cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ScoringError("zero-norm sentence vector", component="semantic")
    cos = float(np.dot(u, v) / (nu * nv))
    return min(max(cos, EPSILON), 1.0)


def word_similarity(
    y: Sentence, x: Sentence, keywords: KeywordSet, provider: EmbeddingProvider
) -> float:
    """Lowest best-match similarity over the keywords.

    For each keyword (embedded in context of ``x``) take the highest
    cosine against the tokens of ``y``; return the minimum over
    keywords.  Cosines are clamped to [0, 1].  An empty keyword set is
    neutral and scores 1.
    """
    if not keywords:
        return 1.0
    x_units = provider.token_units(x)
    first_index: dict[str, int] = {}
    for i, token in enumerate(x.tokens):
        first_index.setdefault(token, i)
    try:
        keyword_rows = np.stack([x_units[first_index[kw]] for kw in keywords.keywords])
    except KeyError as err:
        raise ValueError(f"keyword {err} does not occur in the source sentence") from None
    y_rows = np.stack(provider.token_units(y))
    sims = np.clip(keyword_rows @ y_rows.T, 0.0, 1.0)
    return float(sims.max(axis=1).min())


def sentence_similarity(y: Sentence, x: Sentence, provider: EmbeddingProvider) -> float:
    """Cosine of the pooled sentence vectors, clamped to [1e-9, 1]."""
    return _clamped_cosine(provider.sentence_vector(y), provider.sentence_vector(x))


def semantic_score(f_word: float, f_sent: float, beta: float, gamma: float) -> float:
    """Combine the two similarity levels: f_word**beta * f_sent**gamma."""
    for name, value in (("f_word", f_word), ("f_sent", f_sent)):
        if not (EPSILON <= value <= 1.0):
            raise ValueError(f"{name} must lie in [{EPSILON}, 1], got {value!r}")
    if beta < 0 or gamma < 0:
        raise ValueError("exponents must be non-negative")
    return f_word**beta * f_sent**gamma


class SemanticSimilarity:
    """Adapter bundling keyword extraction and both similarity levels
    for the objective.  Source-side work (keywords, sentence vector) is
    cached per distinct source sentence."""

    def __init__(
        self,
        provider: EmbeddingProvider,
        stopwords: frozenset[str] = frozenset(),
        max_keywords: int = 10,
    ):
        self.provider = provider
        self.stopwords = stopwords
        self.max_keywords = max_keywords
        self._source_cache: dict[tuple[str, ...], tuple[KeywordSet, np.ndarray]] = {}

    def _source_side(self, x: Sentence) -> tuple[KeywordSet, np.ndarray]:
        hit = self._source_cache.get(x.tokens)
        if hit is None:
            hit = (
                extract_keywords(x, self.stopwords, self.max_keywords),
                self.provider.sentence_vector(x),
            )
            if len(self._source_cache) >= 1024:
                self._source_cache.clear()
            self._source_cache[x.tokens] = hit
        return hit

    def similarity(self, y: Sentence, x: Sentence) -> tuple[float, float]:
        keywords, x_vec = self._source_side(x)
        f_word = word_similarity(y, x, keywords, self.provider)
        f_sent = _clamped_cosine(self.provider.sentence_vector(y), x_vec)
        return f_word, f_sent
