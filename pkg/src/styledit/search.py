"""Discrete search over the edit neighborhood.

Three algorithms maximize the composite objective:

* ``sahc``  — steepest-ascent hill climbing: score the whole
  neighborhood each step, move to the best candidate only if it
  improves, return early once the style check fires on it.
* ``fchc``  — first-choice hill climbing: sample one random valid edit
  at a time and accept strict improvements.
* ``sa``    — simulated annealing: like fchc but worse candidates are
  accepted with probability exp(delta_log / temperature) under a
  geometric cooling schedule.

SAHC is fully deterministic; the stochastic algorithms are
deterministic given (seed, config).  One search instance is
single-threaded state; independent searches may run concurrently.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Optional, Sequence

from .core import ScoreBreakdown, Sentence
from .edits import EditOperation

Objective = Callable[[Sentence], ScoreBreakdown]
Neighborhood = Callable[[Sentence], Sequence[tuple[EditOperation, Sentence]]]
#: Returns (edit, candidate, pool size) or None when no edit is valid.
NeighborSampler = Callable[[Sentence, random.Random], Optional[tuple[EditOperation, Sentence, int]]]
StopCheck = Callable[[Sentence, ScoreBreakdown], bool]


class StopReason(str, Enum):
    STYLE_TRANSFERRED = "style_transferred"
    LOCAL_OPTIMUM = "local_optimum"
    BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass(frozen=True)
class SearchConfig:
    """Knobs shared by all three algorithms.

    ``budget`` caps candidate evaluations for the stochastic algorithms;
    when unset it defaults to max_steps times the largest possible
    neighborhood of the input, equalizing evaluation counts with SAHC.
    """

    max_steps: int = 5
    k: int = 50
    seed: int = 0
    budget: int | None = None
    sa_t0: float = 0.05
    sa_cooling: float = 0.95
    stop_criterion: bool = True

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError(f"max_steps must be >= 1, got {self.max_steps}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.budget is not None and self.budget < 0:
            raise ValueError(f"budget must be >= 0, got {self.budget}")
        if not self.sa_t0 > 0:
            raise ValueError(f"sa_t0 must be positive, got {self.sa_t0}")
        if not 0 < self.sa_cooling < 1:
            raise ValueError(f"sa_cooling must lie in (0, 1), got {self.sa_cooling}")

    def effective_budget(self, input_length: int) -> int:
        if self.budget is not None:
            return self.budget
        return self.max_steps * max_neighborhood_size(input_length, self.k)


def max_neighborhood_size(n: int, k: int) -> int:
    """Upper bound on neighbors of a length-n sentence: n deletions,
    n*k replacements, (n+1)*k insertions."""
    return n + k * (2 * n + 1)


@dataclass(frozen=True)
class SearchStep:
    """One evaluated step: the chosen candidate's edit and scores.
    ``accepted`` is False only for a final rejected candidate."""

    step: int
    edit: EditOperation | None
    scores: ScoreBreakdown
    neighborhood_size: int
    accepted: bool

    def as_dict(self) -> dict:
        return {
            "step": self.step,
            "edit": self.edit.as_dict() if self.edit is not None else None,
            "scores": self.scores.as_dict(),
            "neighborhood_size": self.neighborhood_size,
            "accepted": self.accepted,
        }


@dataclass(frozen=True)
class SearchResult:
    output: Sentence
    stop_reason: StopReason
    steps_taken: int
    trace: tuple[SearchStep, ...]

    def trace_jsonl(self) -> str:
        """One structured-text record per line with fields step, edit,
        scores, neighborhood_size."""
        return "\n".join(json.dumps(step.as_dict(), sort_keys=True) for step in self.trace)


def style_transfer_stop(y: Sentence, scores: ScoreBreakdown) -> bool:
    """Default stop check: the style ratio strictly exceeds 1."""
    return scores.f_sty > 1.0


def uniform_sampler(neighborhood: Neighborhood) -> NeighborSampler:
    """Uniform sampling over the enumerated neighborhood of the current
    sentence; the enumeration is cached until the sentence changes."""
    state: dict = {"key": None, "neighbors": ()}

    def sample(y: Sentence, rng: random.Random):
        if state["key"] != y.tokens:
            state["key"] = y.tokens
            state["neighbors"] = tuple(neighborhood(y))
        neighbors = state["neighbors"]
        if not neighbors:
            return None
        op, candidate = neighbors[rng.randrange(len(neighbors))]
        return op, candidate, len(neighbors)

    return sample


def metropolis_accept(delta_log: float, temperature: float, rng: random.Random) -> bool:
    """Metropolis rule on the log objective.

    Improvements are always accepted (without consuming randomness);
    otherwise accept with probability exp(delta_log / temperature).
    """
    if delta_log > 0:
        return True
    if temperature <= 0:
        return False
    ratio = delta_log / temperature
    if ratio < -745.0:  # exp underflows to 0; skip the draw
        return False
    return rng.random() < math.exp(ratio)


def _effective_stop(config: SearchConfig, stop_check: StopCheck | None) -> StopCheck | None:
    return stop_check if config.stop_criterion else None


def sahc(
    x: Sentence,
    objective: Objective,
    neighborhood: Neighborhood,
    config: SearchConfig,
    stop_check: StopCheck | None = style_transfer_stop,
) -> SearchResult:
    """Steepest-ascent hill climbing.

    Each step scores every neighbor and selects the best one (ties break
    toward the earlier candidate in the deterministic enumeration
    order).  If the stop check fires on the selected candidate it is
    returned immediately; if it fails to strictly improve on the current
    sentence, the current sentence is returned as a local optimum; after
    max_steps accepted moves the last candidate is returned.
    """
    stop = _effective_stop(config, stop_check)
    current = x
    current_scores = objective(x)
    steps: list[SearchStep] = []
    for t in range(1, config.max_steps + 1):
        neighbors = neighborhood(current)
        if not neighbors:
            return SearchResult(current, StopReason.LOCAL_OPTIMUM, t - 1, tuple(steps))
        best_op: EditOperation | None = None
        best_sentence: Sentence | None = None
        best_scores: ScoreBreakdown | None = None
        for op, candidate in neighbors:
            scores = objective(candidate)
            if best_scores is None or scores.f_total > best_scores.f_total:
                best_op, best_sentence, best_scores = op, candidate, scores
        assert best_sentence is not None and best_scores is not None
        if stop is not None and stop(best_sentence, best_scores):
            steps.append(SearchStep(t, best_op, best_scores, len(neighbors), accepted=True))
            return SearchResult(best_sentence, StopReason.STYLE_TRANSFERRED, t, tuple(steps))
        if current_scores.f_total >= best_scores.f_total:
            steps.append(SearchStep(t, best_op, best_scores, len(neighbors), accepted=False))
            return SearchResult(current, StopReason.LOCAL_OPTIMUM, t - 1, tuple(steps))
        steps.append(SearchStep(t, best_op, best_scores, len(neighbors), accepted=True))
        current, current_scores = best_sentence, best_scores
    return SearchResult(current, StopReason.BUDGET_EXHAUSTED, config.max_steps, tuple(steps))


def fchc(
    x: Sentence,
    objective: Objective,
    neighbor_sampler: NeighborSampler,
    config: SearchConfig,
    stop_check: StopCheck | None = style_transfer_stop,
) -> SearchResult:
    """First-choice hill climbing: accept only strict improvements."""
    stop = _effective_stop(config, stop_check)
    rng = random.Random(config.seed)
    budget = config.effective_budget(len(x))
    current = x
    current_scores = objective(x)
    steps: list[SearchStep] = []
    accepted = 0
    evaluations = 0
    while evaluations < budget:
        pick = neighbor_sampler(current, rng)
        if pick is None:
            return SearchResult(current, StopReason.LOCAL_OPTIMUM, accepted, tuple(steps))
        op, candidate, pool = pick
        scores = objective(candidate)
        evaluations += 1
        if scores.f_total > current_scores.f_total:
            current, current_scores = candidate, scores
            accepted += 1
            steps.append(SearchStep(accepted, op, scores, pool, accepted=True))
            if stop is not None and stop(candidate, scores):
                return SearchResult(current, StopReason.STYLE_TRANSFERRED, accepted, tuple(steps))
    return SearchResult(current, StopReason.BUDGET_EXHAUSTED, accepted, tuple(steps))


def sa(
    x: Sentence,
    objective: Objective,
    neighbor_sampler: NeighborSampler,
    config: SearchConfig,
    stop_check: StopCheck | None = style_transfer_stop,
) -> SearchResult:
    """Simulated annealing with Metropolis acceptance on the log
    objective and temperature sa_t0 * sa_cooling**i at evaluation i.

    Proposals and acceptance tests draw from independent seeded streams,
    so in the zero-temperature limit the trajectory coincides with
    ``fchc`` under the same seed and sampler.
    """
    stop = _effective_stop(config, stop_check)
    proposal_rng = random.Random(config.seed)
    accept_rng = random.Random(config.seed ^ 0x9E3779B9)
    budget = config.effective_budget(len(x))
    current = x
    current_scores = objective(x)
    steps: list[SearchStep] = []
    accepted = 0
    evaluations = 0
    while evaluations < budget:
        pick = neighbor_sampler(current, proposal_rng)
        if pick is None:
            return SearchResult(current, StopReason.LOCAL_OPTIMUM, accepted, tuple(steps))
        op, candidate, pool = pick
        temperature = config.sa_t0 * config.sa_cooling**evaluations
        scores = objective(candidate)
        evaluations += 1
        delta_log = math.log(max(scores.f_total, 1e-300)) - math.log(
            max(current_scores.f_total, 1e-300)
        )
        if metropolis_accept(delta_log, temperature, accept_rng):
            current, current_scores = candidate, scores
            accepted += 1
            steps.append(SearchStep(accepted, op, scores, pool, accepted=True))
            if stop is not None and stop(candidate, scores):
                return SearchResult(current, StopReason.STYLE_TRANSFERRED, accepted, tuple(steps))
    return SearchResult(current, StopReason.BUDGET_EXHAUSTED, accepted, tuple(steps))


def with_seed(config: SearchConfig, seed: int) -> SearchConfig:
    return replace(config, seed=seed)
