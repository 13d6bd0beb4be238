"""Edit-neighborhood generation.

A neighbor differs from the current sentence by exactly one word-level
operation: a deletion, a replacement, or an insertion.  Replacement and
insertion slots draw their words from a pluggable candidate provider
(corpus unigram frequency, embedding nearest neighbors, or a remote
masked-prediction service), capped at the top k per slot.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Mapping, Protocol, Sequence

from .core import Sentence, _check_token
from .semantic import StaticEmbeddings

if TYPE_CHECKING:  # pragma: no cover
    from .fluency import NgramLM
    from .protocol import ScorerClient


class EditKind(str, Enum):
    DELETE = "delete"
    REPLACE = "replace"
    INSERT = "insert"


@dataclass(frozen=True)
class EditOperation:
    """One edit at a position; ``word`` is present unless deleting.

    Valid positions: delete/replace in [0, n), insert in [0, n] where an
    insert places the word before the index (so n appends).
    """

    kind: EditKind
    position: int
    word: str | None = None

    def __post_init__(self):
        if self.position < 0:
            raise ValueError(f"position must be >= 0, got {self.position}")
        if self.kind is EditKind.DELETE:
            if self.word is not None:
                raise ValueError("delete carries no word")
        elif self.word is None:
            raise ValueError(f"{self.kind.value} requires a word")
        else:
            _check_token(self.word)

    def inverse(self, original: Sentence) -> "EditOperation":
        """The edit that undoes this one when applied to the result."""
        if self.kind is EditKind.DELETE:
            return EditOperation(EditKind.INSERT, self.position, original.tokens[self.position])
        if self.kind is EditKind.REPLACE:
            return EditOperation(EditKind.REPLACE, self.position, original.tokens[self.position])
        return EditOperation(EditKind.DELETE, self.position)

    def as_dict(self) -> dict:
        out: dict = {"kind": self.kind.value, "position": self.position}
        if self.word is not None:
            out["word"] = self.word
        return out


def apply_edit(y: Sentence, op: EditOperation) -> Sentence:
    """Apply one edit, preserving all other tokens in order.

    The result skips token re-validation: the inputs are a validated
    sentence and an operation whose word was validated on construction.
    """
    n = len(y)
    if op.kind is EditKind.DELETE:
        if n == 1:
            raise ValueError("cannot delete the last remaining token")
        if op.position >= n:
            raise ValueError(f"delete position {op.position} out of range for length {n}")
        return Sentence._trusted(y.tokens[: op.position] + y.tokens[op.position + 1 :])
    if op.kind is EditKind.REPLACE:
        if op.position >= n:
            raise ValueError(f"replace position {op.position} out of range for length {n}")
        return Sentence._trusted(y.tokens[: op.position] + (op.word,) + y.tokens[op.position + 1 :])
    if op.position > n:
        raise ValueError(f"insert position {op.position} out of range for length {n}")
    return Sentence._trusted(y.tokens[: op.position] + (op.word,) + y.tokens[op.position :])


class CandidateProvider(Protocol):
    k: int

    def top_k_words(
        self, y: Sentence, kind: EditKind, position: int, k: int
    ) -> Sequence[str]: ...


class UnigramCandidates:
    """Most frequent corpus tokens, independent of edit position."""

    def __init__(self, counts: Mapping[str, float], k: int = 50):
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
        self._ranked = tuple(token for token, _ in ranked)
        self.k = k

    @classmethod
    def from_corpus(cls, corpus: Sequence[Sentence], k: int = 50) -> "UnigramCandidates":
        counts: dict[str, int] = {}
        for sentence in corpus:
            for token in sentence.tokens:
                counts[token] = counts.get(token, 0) + 1
        return cls(counts, k=k)

    @classmethod
    def from_lm(cls, lm: "NgramLM", k: int = 50) -> "UnigramCandidates":
        from .fluency import BOS, EOS, UNK

        counts = {
            token: count
            for token, count in lm.unigram_counts().items()
            if token not in (BOS, EOS, UNK)
        }
        return cls(counts, k=k)

    def top_k_words(self, y: Sentence, kind: EditKind, position: int, k: int) -> Sequence[str]:
        return self._ranked[:k]


class EmbeddingNeighborCandidates:
    """Nearest embedding-space neighbors of the slot's anchor token.

    Replacement slots anchor on the token being replaced; insertion
    slots anchor on the following token (the preceding one at the end of
    the sentence).  The anchor itself is excluded.  Unknown anchors have
    no candidates.
    """

    def __init__(self, embeddings: StaticEmbeddings, k: int = 50):
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        self._embeddings = embeddings
        self.k = k

    def top_k_words(self, y: Sentence, kind: EditKind, position: int, k: int) -> Sequence[str]:
        if kind is EditKind.REPLACE:
            anchor = y.tokens[position]
        else:
            anchor = y.tokens[position] if position < len(y) else y.tokens[-1]
        return self._embeddings.neighbors(anchor, k)


class RemoteCandidates:
    """Slot candidates predicted by a remote masked-prediction service."""

    def __init__(self, client: "ScorerClient", k: int = 50):
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        self._client = client
        self.k = k

    def top_k_words(self, y: Sentence, kind: EditKind, position: int, k: int) -> Sequence[str]:
        return self._client.candidates(y.tokens, kind.value, position, k)


def top_k_words(
    y: Sentence, op_kind: EditKind, position: int, k: int, provider: CandidateProvider
) -> tuple[str, ...]:
    """Up to k distinct candidate words for a replace/insert slot,
    ranked by provider-specific relevance."""
    if op_kind not in (EditKind.REPLACE, EditKind.INSERT):
        raise ValueError(f"candidates only exist for replace/insert, got {op_kind}")
    n = len(y)
    limit = n - 1 if op_kind is EditKind.REPLACE else n
    if not 0 <= position <= limit:
        raise ValueError(f"position {position} invalid for {op_kind.value} on length {n}")
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    seen: dict[str, None] = {}
    for word in provider.top_k_words(y, op_kind, position, k):
        if word not in seen:
            seen[word] = None
        if len(seen) == k:
            break
    return tuple(seen)


def enumerate_neighbors(
    y: Sentence, provider: CandidateProvider, k: int | None = None
) -> tuple[tuple[EditOperation, Sentence], ...]:
    """Every sentence one edit away from ``y``.

    Order is deterministic: position ascending; within a position,
    delete, then replacements, then insertions, each in provider rank
    order.  Identity replacements are filtered, deletes are skipped on
    length-1 sentences, and duplicates (by resulting token sequence)
    keep their first occurrence.
    """
    if k is None:
        k = provider.k
    n = len(y)
    seen: dict[tuple[str, ...], tuple[EditOperation, Sentence]] = {}

    def add(op: EditOperation) -> None:
        result = apply_edit(y, op)
        if result.tokens not in seen:
            seen[result.tokens] = (op, result)

    for position in range(n + 1):
        if position < n:
            if n > 1:
                add(EditOperation(EditKind.DELETE, position))
            for word in top_k_words(y, EditKind.REPLACE, position, k, provider):
                if word != y.tokens[position]:
                    add(EditOperation(EditKind.REPLACE, position, word))
        for word in top_k_words(y, EditKind.INSERT, position, k, provider):
            add(EditOperation(EditKind.INSERT, position, word))
    return tuple(seen.values())
