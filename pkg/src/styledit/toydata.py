"""Synthetic antonym benchmark for desk-scale runs.

Generates a sentiment-transfer corpus where each negative input has a
known positive rewrite (polar words swapped for their antonyms), plus
the artifacts a run needs: a fluency corpus covering both polarities, a
search lexicon, a distinct held-out evaluation lexicon, antonym-aware
word vectors, a stopword list, and a ready-to-use config.

Everything is seeded, so a given (seed, size) pair reproduces the same
benchmark byte for byte.  Usable as a module (``python -m
styledit.toydata --out DIR``) or via :func:`write_benchmark`.
"""

from __future__ import annotations

import argparse
import random
from pathlib import Path

import numpy as np

from .core import Sentence
from .fluency import train_ngram

#: (positive, negative) antonym pairs; the heart of the benchmark.
PAIRS = [
    ("good", "bad"),
    ("great", "terrible"),
    ("happy", "sad"),
    ("tasty", "bland"),
    ("clean", "dirty"),
    ("fresh", "stale"),
    ("friendly", "rude"),
    ("fast", "slow"),
    ("cheap", "pricey"),
    ("quiet", "noisy"),
]

NOUNS = ["food", "service", "place", "staff", "room", "coffee", "music", "crowd"]
FILLERS = ["the", "was", "is", "really", "very", "so", "and", "here", "a"]
STOPWORDS = sorted(set(FILLERS))

EMBEDDING_DIM = 8


def _polar_words(target_positive: bool) -> list[str]:
    return [pair[0] if target_positive else pair[1] for pair in PAIRS]


def make_sentences(size: int, seed: int, positive: bool) -> list[Sentence]:
    """Benchmark sentences of one polarity, each with 1-2 polar words."""
    rng = random.Random(seed)
    polar = _polar_words(positive)
    sentences = []
    for _ in range(size):
        noun = rng.choice(NOUNS)
        verb = rng.choice(["was", "is"])
        adverb = rng.choice(["really", "very", "so", ""])
        first = rng.choice(polar)
        tokens = ["the", noun, verb]
        if adverb:
            tokens.append(adverb)
        tokens.append(first)
        if rng.random() < 0.35:
            second = rng.choice([w for w in polar if w != first])
            tokens += ["and", second]
        sentences.append(Sentence(tuple(tokens)))
    return sentences


def flip_polarity(sentence: Sentence) -> Sentence:
    """Swap every polar word for its antonym."""
    swap = {}
    for pos, neg in PAIRS:
        swap[pos] = neg
        swap[neg] = pos
    return Sentence(tuple(swap.get(tok, tok) for tok in sentence.tokens))


def make_corpus(size: int, seed: int) -> list[Sentence]:
    """Fluency-training corpus covering both polarities."""
    half = size // 2
    return make_sentences(half, seed, positive=False) + make_sentences(
        size - half, seed + 1, positive=True
    )


def search_lexicon_lines() -> list[str]:
    """Label-balanced lexicon for the search-time style backend.

    Uniform weights keep the decision boundary at "more positive words
    than negative ones", so the stop criterion cannot fire while an
    unflipped source-style word remains.
    """
    lines = ["# token\tlabel\tweight"]
    for pos, neg in PAIRS:
        lines.append(f"{pos}\tpositive\t3.0")
        lines.append(f"{neg}\tnegative\t3.0")
    return lines


def eval_lexicon_lines() -> list[str]:
    """Held-out evaluation lexicon: uniform weights plus polar words the
    search lexicon never sees."""
    lines = ["# held-out evaluation lexicon"]
    for pos, neg in PAIRS:
        lines.append(f"{pos}\tpositive\t1.0")
        lines.append(f"{neg}\tnegative\t1.0")
    lines.append("wonderful\tpositive\t1.0")
    lines.append("horrible\tnegative\t1.0")
    return lines


def make_embeddings(seed: int) -> dict[str, np.ndarray]:
    """Static vectors where antonyms stay moderately similar (shared
    topic direction, opposite polarity component)."""
    rng = np.random.default_rng(seed)

    def unit(vec: np.ndarray) -> np.ndarray:
        return vec / np.linalg.norm(vec)

    polarity_axis = np.zeros(EMBEDDING_DIM)
    polarity_axis[0] = 1.0
    vectors: dict[str, np.ndarray] = {}
    for pos, neg in PAIRS:
        topic = rng.normal(size=EMBEDDING_DIM)
        topic[0] = 0.0
        topic = unit(topic)
        vectors[pos] = topic + 0.5 * polarity_axis
        vectors[neg] = topic - 0.5 * polarity_axis
    for word in NOUNS + FILLERS + ["wonderful", "horrible"]:
        vec = rng.normal(size=EMBEDDING_DIM)
        vectors[word] = unit(vec)
    return vectors


def config_lines(algorithm: str = "sahc", seed: int = 0) -> list[str]:
    return [
        "# synthetic antonym benchmark",
        "task_word = sentiment",
        "source_style = negative",
        "target_style = positive",
        f"algorithm = {algorithm}",
        "max_steps = 5",
        "k = 50",
        f"seed = {seed}",
        "style_backend = lexicon",
        "style_lexicon = search_lexicon.tsv",
        "eval_lexicon = eval_lexicon.tsv",
        "lm_path = fluency.nglm",
        "embeddings = embeddings.txt",
        "stopwords = stopwords.txt",
        "candidate_provider = unigram",
    ]


def write_benchmark(
    out_dir: str | Path, size: int = 200, seed: int = 7, corpus_size: int = 400
) -> Path:
    """Write the full benchmark into ``out_dir`` and return it."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    inputs = make_sentences(size, seed, positive=False)
    references = [flip_polarity(s) for s in inputs]
    corpus = make_corpus(corpus_size, seed + 100)

    (out / "inputs.txt").write_text(
        "\n".join(s.text() for s in inputs) + "\n", encoding="utf-8"
    )
    (out / "references.txt").write_text(
        "\n".join(s.text() for s in references) + "\n", encoding="utf-8"
    )
    (out / "corpus.txt").write_text(
        "\n".join(s.text() for s in corpus) + "\n", encoding="utf-8"
    )
    (out / "search_lexicon.tsv").write_text(
        "\n".join(search_lexicon_lines()) + "\n", encoding="utf-8"
    )
    (out / "eval_lexicon.tsv").write_text(
        "\n".join(eval_lexicon_lines()) + "\n", encoding="utf-8"
    )
    (out / "stopwords.txt").write_text("\n".join(STOPWORDS) + "\n", encoding="utf-8")

    vectors = make_embeddings(seed + 200)
    lines = []
    for token in sorted(vectors):
        components = " ".join(f"{v:.6f}" for v in vectors[token])
        lines.append(f"{token} {components}")
    (out / "embeddings.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")

    lm = train_ngram(corpus, order=3, delta=1.0)
    lm.save(out / "fluency.nglm")

    (out / "run.cfg").write_text("\n".join(config_lines()) + "\n", encoding="utf-8")
    return out


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="generate the synthetic antonym benchmark")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--size", type=int, default=200)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args(argv)
    out = write_benchmark(args.out, size=args.size, seed=args.seed)
    print(f"benchmark written to {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
