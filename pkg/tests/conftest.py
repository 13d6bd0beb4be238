import math
from dataclasses import dataclass

import pytest

from styledit.core import Sentence


@dataclass
class StubStyle:
    ratio: float = 1.0

    def style_ratio(self, y):
        return self.ratio


@dataclass
class StubFluency:
    mean_lp: float = 0.0

    def mean_logprob(self, y):
        return self.mean_lp


@dataclass
class StubSemantic:
    f_word: float = 1.0
    f_sent: float = 1.0

    def similarity(self, y, x):
        return self.f_word, self.f_sent


@pytest.fixture
def stub_bundle_factory():
    """Bundle with directly controllable factor values.

    f_flu is steered through mean_logprob: with alpha=1 the exposed
    fluency score equals exp(mean_lp).
    """
    from styledit.core import ScorerBundle

    def make(ratio=1.0, f_flu=1.0, f_word=1.0, f_sent=1.0):
        return ScorerBundle(
            style=StubStyle(ratio),
            fluency=StubFluency(math.log(f_flu)),
            semantic=StubSemantic(f_word, f_sent),
        )

    return make


@pytest.fixture
def sentence():
    return Sentence.from_text("he loves sandwiches")
