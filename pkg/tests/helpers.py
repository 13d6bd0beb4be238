"""Shared test utilities: independent oracles and instance generators.

Everything here is deliberately written from first principles, separate
from the package implementation, so tests compare two routes to the
same answer.
"""

from __future__ import annotations

import math
import random

import numpy as np

from styledit.core import ScorerBundle, Sentence, StyleTask, Weights, composite_score
from styledit.edits import EditKind, UnigramCandidates
from styledit.fluency import NgramFluencyScorer, train_ngram
from styledit.semantic import SemanticSimilarity, StaticEmbeddings
from styledit.style import LexiconBackend, StyleLexicon, StyleRatioScorer


def levenshtein(a, b) -> int:
    """Token-level edit distance, straightforward DP."""
    a, b = list(a), list(b)
    dp = list(range(len(b) + 1))
    for i, token_a in enumerate(a, start=1):
        prev = dp[0]
        dp[0] = i
        for j, token_b in enumerate(b, start=1):
            current = dp[j]
            dp[j] = min(dp[j] + 1, dp[j - 1] + 1, prev + (token_a != token_b))
            prev = current
    return dp[-1]


def bleu_oracle(hypotheses, reference_sets) -> float:
    """Independent corpus BLEU-4: clipped counts against the best
    reference, closest-reference-length brevity penalty, unsmoothed.
    Operates on plain token lists."""
    matched = {n: 0 for n in (1, 2, 3, 4)}
    totals = {n: 0 for n in (1, 2, 3, 4)}
    hyp_len = 0
    ref_len = 0
    for hyp, refs in zip(hypotheses, reference_sets):
        hyp = list(hyp)
        hyp_len += len(hyp)
        ref_len += sorted((abs(len(r) - len(hyp)), len(r)) for r in refs)[0][1]
        for n in (1, 2, 3, 4):
            grams: dict[tuple, int] = {}
            for i in range(len(hyp) - n + 1):
                gram = tuple(hyp[i : i + n])
                grams[gram] = grams.get(gram, 0) + 1
            totals[n] += max(len(hyp) - n + 1, 0)
            for gram, count in grams.items():
                best = 0
                for ref in refs:
                    ref = list(ref)
                    occurrences = sum(
                        1 for i in range(len(ref) - n + 1) if tuple(ref[i : i + n]) == gram
                    )
                    best = max(best, occurrences)
                matched[n] += min(count, best)
    log_sum = 0.0
    for n in (1, 2, 3, 4):
        if totals[n] == 0 or matched[n] == 0:
            return 0.0
        log_sum += math.log(matched[n] / totals[n])
    brevity = math.exp(1.0 - ref_len / hyp_len) if hyp_len < ref_len else 1.0
    return 100.0 * brevity * math.exp(log_sum / 4.0)


def brute_force_neighbors(sentence: Sentence, provider, k: int):
    """Re-derive the edit neighborhood from its stated rules: position
    ascending, delete < replace < insert per position, identity
    replacements dropped, first occurrence wins on duplicates."""
    n = len(sentence)
    ordered: list[tuple] = []
    seen: set[tuple[str, ...]] = set()

    def push(kind: EditKind, position: int, word):
        tokens = list(sentence.tokens)
        if kind is EditKind.DELETE:
            del tokens[position]
        elif kind is EditKind.REPLACE:
            tokens[position] = word
        else:
            tokens.insert(position, word)
        key = tuple(tokens)
        if key in seen:
            return
        seen.add(key)
        ordered.append((kind, position, word, Sentence(key)))

    for position in range(n + 1):
        if position < n:
            if n > 1:
                push(EditKind.DELETE, position, None)
            picked: list[str] = []
            for word in provider.top_k_words(sentence, EditKind.REPLACE, position, k):
                if word not in picked:
                    picked.append(word)
                if len(picked) == k:
                    break
            for word in picked:
                if word != sentence.tokens[position]:
                    push(EditKind.REPLACE, position, word)
        picked = []
        for word in provider.top_k_words(sentence, EditKind.INSERT, position, k):
            if word not in picked:
                picked.append(word)
            if len(picked) == k:
                break
        for word in picked:
            push(EditKind.INSERT, position, word)
    return ordered


def brute_force_argmax(sentence: Sentence, provider, k: int, objective):
    """Exhaustive best neighbor under the documented tie-break (first in
    enumeration order)."""
    best = None
    for kind, position, word, candidate in brute_force_neighbors(sentence, provider, k):
        scores = objective(candidate)
        if best is None or scores.f_total > best[1].f_total:
            best = (candidate, scores, (kind, position, word))
    return best


class ToyInstance:
    """A random desk-scale transfer instance: balanced lexicon style
    scorer, unigram fluency model, static random embeddings, and a
    full-vocabulary unigram candidate provider."""

    def __init__(self, seed: int):
        rng = random.Random(seed)
        vocab_size = rng.randint(8, 20)
        vocab = [f"w{i}" for i in range(vocab_size)]
        n_pairs = rng.randint(1, 3)
        entries: dict[str, tuple[str, float]] = {}
        for i in range(n_pairs):
            weight = rng.choice([1.0, 2.0, 3.0])
            entries[vocab[2 * i]] = ("pos", weight)
            entries[vocab[2 * i + 1]] = ("neg", weight)
        self.task = StyleTask("sentiment", "neg", "pos")
        self.lexicon = StyleLexicon(entries)
        corpus = []
        for _ in range(rng.randint(10, 30)):
            length = rng.randint(1, 6)
            corpus.append(Sentence(tuple(rng.choice(vocab) for _ in range(length))))
        self.corpus = corpus
        self.lm = train_ngram(corpus, order=1, delta=1.0)
        np_rng = np.random.default_rng(seed + 1)
        table = {}
        for token in vocab:
            vec = np_rng.normal(size=6)
            table[token] = vec / np.linalg.norm(vec)
        self.embeddings = StaticEmbeddings(table)
        stopwords = frozenset(rng.sample(vocab, rng.randint(0, 2)))
        self.vocab = vocab
        self.k = vocab_size
        self.provider = UnigramCandidates.from_corpus(corpus, k=self.k)
        self.weights = Weights(alpha=0.25, beta=1.0 / 6.0, gamma=1.0 / 6.0)
        self.bundle = ScorerBundle(
            style=StyleRatioScorer(LexiconBackend(self.lexicon), self.task),
            fluency=NgramFluencyScorer(self.lm),
            semantic=SemanticSimilarity(self.embeddings, stopwords, max_keywords=10),
        )
        length = rng.randint(1, 6)
        self.x = Sentence(tuple(rng.choice(vocab) for _ in range(length)))

    def objective(self, memo: bool = True):
        cache: dict[tuple[str, ...], object] = {}

        def score(y: Sentence):
            if not memo:
                return composite_score(self.x, y, self.bundle, self.weights)
            hit = cache.get(y.tokens)
            if hit is None:
                hit = composite_score(self.x, y, self.bundle, self.weights)
                cache[y.tokens] = hit
            return hit

        return score
