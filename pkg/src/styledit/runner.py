"""Experiment harness: run configuration, engine assembly, the corpus
runner, and the search-algorithm comparison.

Run configuration lives in flat UTF-8 ``key = value`` files with ``#``
comments.  Unknown keys are errors; relative paths resolve against the
config file's directory.  Deterministic configs produce byte-identical
outputs across runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Sequence

from .core import ScoreBreakdown, ScorerBundle, Sentence, StyleTask, Weights, composite_score
from .edits import (
    CandidateProvider,
    EmbeddingNeighborCandidates,
    RemoteCandidates,
    UnigramCandidates,
    enumerate_neighbors,
)
from .errors import ConfigError, ScoringError
from .fluency import NgramFluencyScorer, NgramLM, RemoteFluencyScorer, perplexity
from .metrics import EvalReport, SentenceOutcome, bleu4, means, transfer_accuracy
from .protocol import ScorerClient
from .search import (
    SearchConfig,
    SearchResult,
    fchc,
    sa,
    sahc,
    uniform_sampler,
    with_seed,
)
from .semantic import RemoteEmbeddings, SemanticSimilarity, StaticEmbeddings, load_stopwords
from .style import LexiconBackend, RemoteStyleBackend, StyleLexicon, StyleRatioScorer, is_transferred

#: Weight defaults per task word (alpha, beta, gamma); sentiment-style
#: tasks use the first row, formality the second.
_DEFAULT_WEIGHTS = Weights(alpha=0.25, beta=1.0 / 6.0, gamma=1.0 / 6.0)
_FORMALITY_WEIGHTS = Weights(alpha=0.25, beta=0.375, gamma=0.375)

_ALGORITHMS = ("sahc", "fchc", "sa")

_KEYS = {
    "task_word", "source_style", "target_style",
    "alpha", "beta", "gamma",
    "algorithm", "max_steps", "k", "seed", "budget", "sa_t0", "sa_cooling", "stop_criterion",
    "style_backend", "style_lexicon", "eval_lexicon",
    "fluency_backend", "lm_path",
    "embedding_backend", "embeddings", "stopwords", "max_keywords",
    "candidate_provider",
    "remote_url", "remote_timeout", "remote_retries", "remote_token",
}


@dataclass(frozen=True)
class RunConfig:
    """Parsed and validated run configuration."""

    task: StyleTask
    weights: Weights
    search: SearchConfig
    algorithm: str = "sahc"
    style_backend: str = "lexicon"
    fluency_backend: str = "ngram"
    embedding_backend: str = "static"
    candidate_provider: str = "unigram"
    style_lexicon: Path | None = None
    eval_lexicon: Path | None = None
    lm_path: Path | None = None
    embeddings: Path | None = None
    stopwords: Path | None = None
    max_keywords: int = 10
    remote_url: str | None = None
    remote_timeout: float = 10.0
    remote_retries: int = 2
    remote_token: str | None = None


def _parse_pairs(text: str) -> dict[str, str]:
    pairs: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"config line {lineno}: expected key = value, got {line!r}")
        key, _, value = stripped.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _KEYS:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        if key in pairs:
            raise ConfigError(f"config line {lineno}: duplicate key {key!r}")
        pairs[key] = value
    return pairs


def _get_float(pairs: dict[str, str], key: str, default: float) -> float:
    if key not in pairs:
        return default
    try:
        return float(pairs[key])
    except ValueError as err:
        raise ConfigError(f"config key {key!r}: bad number {pairs[key]!r}") from err


def _get_int(pairs: dict[str, str], key: str, default: int) -> int:
    if key not in pairs:
        return default
    try:
        return int(pairs[key])
    except ValueError as err:
        raise ConfigError(f"config key {key!r}: bad integer {pairs[key]!r}") from err


def _get_bool(pairs: dict[str, str], key: str, default: bool) -> bool:
    if key not in pairs:
        return default
    value = pairs[key].lower()
    if value in ("true", "yes", "1", "on"):
        return True
    if value in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"config key {key!r}: bad boolean {pairs[key]!r}")


def _get_choice(pairs: dict[str, str], key: str, default: str, choices: Sequence[str]) -> str:
    value = pairs.get(key, default)
    if value not in choices:
        raise ConfigError(f"config key {key!r}: expected one of {list(choices)}, got {value!r}")
    return value


def _get_path(pairs: dict[str, str], key: str, base_dir: Path | None) -> Path | None:
    if key not in pairs or not pairs[key]:
        return None
    path = Path(pairs[key])
    if not path.is_absolute() and base_dir is not None:
        path = base_dir / path
    return path


def parse_run_config(text: str, base_dir: str | Path | None = None) -> RunConfig:
    """Parse a config file's content.  Referenced files are checked for
    existence here and parsed when the engine is built."""
    base = Path(base_dir) if base_dir is not None else None
    pairs = _parse_pairs(text)
    for key in ("task_word", "source_style", "target_style"):
        if key not in pairs or not pairs[key]:
            raise ConfigError(f"config key {key!r} is required")
    try:
        task = StyleTask(pairs["task_word"], pairs["source_style"], pairs["target_style"])
    except ValueError as err:
        raise ConfigError(str(err)) from err

    base_weights = _FORMALITY_WEIGHTS if task.task_word == "formality" else _DEFAULT_WEIGHTS
    try:
        weights = Weights(
            alpha=_get_float(pairs, "alpha", base_weights.alpha),
            beta=_get_float(pairs, "beta", base_weights.beta),
            gamma=_get_float(pairs, "gamma", base_weights.gamma),
        )
        search = SearchConfig(
            max_steps=_get_int(pairs, "max_steps", 5),
            k=_get_int(pairs, "k", 50),
            seed=_get_int(pairs, "seed", 0),
            budget=_get_int(pairs, "budget", -1) if "budget" in pairs else None,
            sa_t0=_get_float(pairs, "sa_t0", 0.05),
            sa_cooling=_get_float(pairs, "sa_cooling", 0.95),
            stop_criterion=_get_bool(pairs, "stop_criterion", True),
        )
    except ValueError as err:
        raise ConfigError(str(err)) from err

    config = RunConfig(
        task=task,
        weights=weights,
        search=search,
        algorithm=_get_choice(pairs, "algorithm", "sahc", _ALGORITHMS),
        style_backend=_get_choice(pairs, "style_backend", "lexicon", ("lexicon", "remote")),
        fluency_backend=_get_choice(pairs, "fluency_backend", "ngram", ("ngram", "remote")),
        embedding_backend=_get_choice(pairs, "embedding_backend", "static", ("static", "remote")),
        candidate_provider=_get_choice(
            pairs, "candidate_provider", "unigram", ("unigram", "embedding", "remote")
        ),
        style_lexicon=_get_path(pairs, "style_lexicon", base),
        eval_lexicon=_get_path(pairs, "eval_lexicon", base),
        lm_path=_get_path(pairs, "lm_path", base),
        embeddings=_get_path(pairs, "embeddings", base),
        stopwords=_get_path(pairs, "stopwords", base),
        max_keywords=_get_int(pairs, "max_keywords", 10),
        remote_url=pairs.get("remote_url") or None,
        remote_timeout=_get_float(pairs, "remote_timeout", 10.0),
        remote_retries=_get_int(pairs, "remote_retries", 2),
        remote_token=pairs.get("remote_token") or None,
    )
    _validate_requirements(config)
    return config


def load_run_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from err
    return parse_run_config(text, base_dir=path.parent)


def _validate_requirements(config: RunConfig) -> None:
    if config.style_backend == "lexicon" and config.style_lexicon is None:
        raise ConfigError("style_backend = lexicon requires style_lexicon")
    if config.eval_lexicon is None:
        raise ConfigError("eval_lexicon is required (held-out evaluation classifier)")
    if config.lm_path is None:
        raise ConfigError("lm_path is required (fluency corpus model)")
    needs_static = config.embedding_backend == "static" or config.candidate_provider == "embedding"
    if needs_static and config.embeddings is None:
        raise ConfigError("static embeddings require the embeddings key")
    uses_remote = "remote" in (
        config.style_backend,
        config.fluency_backend,
        config.embedding_backend,
        config.candidate_provider,
    )
    if uses_remote and not config.remote_url:
        raise ConfigError("remote backends require remote_url")
    if config.max_keywords < 0:
        raise ConfigError(f"max_keywords must be >= 0, got {config.max_keywords}")
    for key in ("style_lexicon", "eval_lexicon", "lm_path", "embeddings", "stopwords"):
        path = getattr(config, key)
        if path is not None and not Path(path).is_file():
            raise ConfigError(f"config key {key!r}: file not found: {path}")


class Engine:
    """A fully wired transfer pipeline: scorers, candidate provider,
    search algorithm, and the held-out evaluation classifier.

    Backends are immutable after construction; one engine may serve
    concurrent searches.
    """

    def __init__(self, config: RunConfig):
        self.config = config
        self.client: ScorerClient | None = None
        if config.remote_url:
            self.client = ScorerClient(
                config.remote_url,
                timeout=config.remote_timeout,
                token=config.remote_token,
                retries=config.remote_retries,
            )

        self.lm = NgramLM.load(config.lm_path)
        self.eval_backend = LexiconBackend(StyleLexicon.load(config.eval_lexicon))

        if config.style_backend == "lexicon":
            style_backend = LexiconBackend(StyleLexicon.load(config.style_lexicon))
        else:
            style_backend = RemoteStyleBackend(self.client)
        self.style_backend = style_backend

        if config.fluency_backend == "ngram":
            fluency_scorer = NgramFluencyScorer(self.lm)
        else:
            fluency_scorer = RemoteFluencyScorer(self.client)

        static_embeddings: StaticEmbeddings | None = None
        if config.embeddings is not None:
            static_embeddings = StaticEmbeddings.load(config.embeddings)
        if config.embedding_backend == "static":
            provider = static_embeddings
        else:
            provider = RemoteEmbeddings(self.client)
        stopwords = load_stopwords(config.stopwords) if config.stopwords else frozenset()

        self.bundle = ScorerBundle(
            style=StyleRatioScorer(style_backend, config.task),
            fluency=fluency_scorer,
            semantic=SemanticSimilarity(provider, stopwords, config.max_keywords),
        )

        if config.candidate_provider == "unigram":
            self.provider: CandidateProvider = UnigramCandidates.from_lm(
                self.lm, k=config.search.k
            )
        elif config.candidate_provider == "embedding":
            self.provider = EmbeddingNeighborCandidates(static_embeddings, k=config.search.k)
        else:
            self.provider = RemoteCandidates(self.client, k=config.search.k)

    def close(self) -> None:
        if self.client is not None:
            self.client.close()

    def neighborhood(self, y: Sentence):
        return enumerate_neighbors(y, self.provider, self.config.search.k)

    def objective_for(self, x: Sentence) -> Callable[[Sentence], ScoreBreakdown]:
        """Memoized objective bound to source sentence ``x``."""
        cache: dict[tuple[str, ...], ScoreBreakdown] = {}

        def objective(y: Sentence) -> ScoreBreakdown:
            hit = cache.get(y.tokens)
            if hit is None:
                hit = composite_score(x, y, self.bundle, self.config.weights)
                cache[y.tokens] = hit
            return hit

        return objective

    def transfer(
        self,
        x: Sentence,
        algorithm: str | None = None,
        search: SearchConfig | None = None,
        objective: Callable[[Sentence], ScoreBreakdown] | None = None,
    ) -> tuple[SearchResult, ScoreBreakdown]:
        """Run the configured search on one sentence; returns the result
        and the final candidate's score breakdown.  A memoized objective
        may be passed in to share candidate scores across repeated runs
        on the same input."""
        algorithm = algorithm or self.config.algorithm
        search = search or self.config.search
        objective = objective or self.objective_for(x)
        if algorithm == "sahc":
            result = sahc(x, objective, self.neighborhood, search)
        elif algorithm == "fchc":
            result = fchc(x, objective, uniform_sampler(self.neighborhood), search)
        elif algorithm == "sa":
            result = sa(x, objective, uniform_sampler(self.neighborhood), search)
        else:
            raise ConfigError(f"unknown search algorithm {algorithm!r}")
        return result, objective(result.output)

    def classify_transferred(self, y: Sentence) -> bool:
        return is_transferred(y, self.config.task, self.eval_backend)


@dataclass(frozen=True)
class RunOutcome:
    """Everything a corpus run produces: outputs (input order), the
    metric report, and one trace block per sentence."""

    outputs: tuple[Sentence, ...]
    report: EvalReport
    traces: tuple[tuple[dict, ...], ...] = field(default_factory=tuple)


def run_corpus(
    inputs: Sequence[Sentence],
    engine: Engine,
    reference_sets: Sequence[Sequence[Sentence]] | None = None,
) -> RunOutcome:
    """Transfer every input sentence and compute the corpus report.

    Per-sentence scoring failures are recorded, pass the input through
    unchanged, and count as untransferred; they never abort the run.
    Without references, BLEU is computed against the inputs themselves
    (a content-preservation reading).  Output order matches input order.
    """
    if not inputs:
        raise ConfigError("corpus run needs at least one input sentence")
    if reference_sets is not None and len(reference_sets) != len(inputs):
        raise ConfigError(
            f"{len(inputs)} inputs but {len(reference_sets)} reference sets"
        )
    outputs: list[Sentence] = []
    records: list[SentenceOutcome] = []
    traces: list[tuple[dict, ...]] = []
    for index, x in enumerate(inputs):
        try:
            result, final_scores = engine.transfer(x)
            output = result.output
            stop_reason = result.stop_reason.value
            steps = result.steps_taken
            objective_value = final_scores.f_total
            trace = tuple(step.as_dict() for step in result.trace)
            error = None
            transferred = engine.classify_transferred(output)
        except ScoringError as err:
            output = x
            stop_reason = "error"
            steps = 0
            objective_value = math.nan
            trace = ()
            error = str(err)
            transferred = False  # counted as untransferred by contract
        outputs.append(output)
        traces.append(trace)
        records.append(
            SentenceOutcome(
                index=index,
                input_text=x.text(),
                output_text=output.text(),
                stop_reason=stop_reason,
                steps_taken=steps,
                objective=objective_value,
                transferred=transferred,
                error=error,
            )
        )
    accuracy = 100.0 * sum(1 for r in records if r.transferred) / len(records)
    refs = (
        [list(group) for group in reference_sets]
        if reference_sets is not None
        else [[x] for x in inputs]
    )
    bleu = bleu4(outputs, refs)
    gm, hm = means(accuracy, bleu)
    ppl = perplexity(engine.lm, outputs)
    report = EvalReport(
        accuracy=accuracy, bleu=bleu, gm=gm, hm=hm, ppl=ppl, records=tuple(records)
    )
    return RunOutcome(outputs=tuple(outputs), report=report, traces=tuple(traces))


def evaluate_outputs(
    hypotheses: Sequence[Sentence],
    reference_sets: Sequence[Sequence[Sentence]],
    engine: Engine,
) -> EvalReport:
    """Score existing outputs against references with the engine's
    evaluation classifier and fluency model."""
    if len(hypotheses) != len(reference_sets):
        raise ConfigError(
            f"{len(hypotheses)} hypotheses but {len(reference_sets)} reference sets"
        )
    accuracy = transfer_accuracy(hypotheses, engine.config.task, engine.eval_backend)
    bleu = bleu4(hypotheses, reference_sets)
    gm, hm = means(accuracy, bleu)
    ppl = perplexity(engine.lm, hypotheses)
    return EvalReport(accuracy=accuracy, bleu=bleu, gm=gm, hm=hm, ppl=ppl)


def _seed_for(base: int, replicate: int, index: int) -> int:
    # Distinct, reproducible per (replicate, sentence) stream.
    return base + 1_000_003 * replicate + index


def compare_search(
    inputs: Sequence[Sentence],
    engine: Engine,
    algos: Sequence[str],
    seeds: int = 1,
) -> dict:
    """Run several algorithms on the same corpus under equal evaluation
    budgets and aggregate final objective and transfer accuracy.

    SAHC is deterministic and runs once per sentence; stochastic
    algorithms run ``seeds`` replicates per sentence with derived seeds.
    """
    if not inputs:
        raise ConfigError("compare_search needs at least one input sentence")
    if seeds < 1:
        raise ConfigError(f"seeds must be >= 1, got {seeds}")
    unknown = [a for a in algos if a not in _ALGORITHMS]
    if unknown:
        raise ConfigError(f"unknown algorithms: {unknown}")
    base_search = engine.config.search
    comparison: dict[str, dict] = {}
    for algorithm in algos:
        replicates = 1 if algorithm == "sahc" else seeds
        objectives: list[float] = []
        steps: list[int] = []
        transferred = 0
        runs = 0
        stop_reasons: dict[str, int] = {}
        for index, x in enumerate(inputs):
            # candidate scores are deterministic per input, so the memo
            # is shared across the seed replicates
            objective = engine.objective_for(x)
            for replicate in range(replicates):
                search = (
                    base_search
                    if algorithm == "sahc"
                    else with_seed(base_search, _seed_for(base_search.seed, replicate, index))
                )
                result, final_scores = engine.transfer(
                    x, algorithm=algorithm, search=search, objective=objective
                )
                objectives.append(final_scores.f_total)
                steps.append(result.steps_taken)
                stop_reasons[result.stop_reason.value] = (
                    stop_reasons.get(result.stop_reason.value, 0) + 1
                )
                transferred += 1 if engine.classify_transferred(result.output) else 0
                runs += 1
        comparison[algorithm] = {
            "runs": runs,
            "mean_objective": sum(objectives) / runs,
            "accuracy": 100.0 * transferred / runs,
            "mean_steps": sum(steps) / runs,
            "stop_reasons": dict(sorted(stop_reasons.items())),
        }
    return {
        "algos": list(algos),
        "seeds": seeds,
        "sentences": len(inputs),
        "budget_rule": "max_steps x max neighborhood size of each input",
        "results": comparison,
    }


def replace_search(config: RunConfig, **changes) -> RunConfig:
    """Convenience for tests: a copy of ``config`` with search fields
    replaced."""
    return replace(config, search=replace(config.search, **changes))
