"""Text style transfer by discrete local search over word-level edits.

A candidate sentence is scored by the product of a style ratio, a
fluency score, and a semantic-similarity score; steepest-ascent hill
climbing walks the single-edit neighborhood until the style flips, a
local optimum is reached, or the step budget runs out.
"""

from .core import (
    EPSILON,
    ScoreBreakdown,
    ScorerBundle,
    Sentence,
    StyleTask,
    Weights,
    composite_score,
)
from .errors import ConfigError, ProtocolError, ScoringError, StyleTransferError

__version__ = "0.1.0"

__all__ = [
    "EPSILON",
    "ScoreBreakdown",
    "ScorerBundle",
    "Sentence",
    "StyleTask",
    "Weights",
    "composite_score",
    "ConfigError",
    "ProtocolError",
    "ScoringError",
    "StyleTransferError",
    "__version__",
]
