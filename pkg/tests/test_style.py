import math
import random
from fractions import Fraction

import pytest

from styledit.core import Sentence, StyleTask
from styledit.errors import ConfigError
from styledit.style import (
    LexiconBackend,
    RemoteStyleBackend,
    StyleLexicon,
    StyleProbabilities,
    build_prompt,
    is_transferred,
    style_probabilities,
    style_score,
)

TASK = StyleTask("sentiment", "negative", "positive")


class FixedBackend:
    def __init__(self, p_source, p_target):
        self._probs = StyleProbabilities(p_source=p_source, p_target=p_target)

    def style_probabilities(self, y, task):
        return self._probs


class TestBuildPrompt:
    def test_template_instantiation(self):
        prompt = build_prompt(TASK, Sentence.from_text("he loves sandwiches"))
        assert prompt.text == "The sentiment of the text { he loves sandwiches } is :"

    def test_formality_single_token(self):
        task = StyleTask("formality", "informal", "formal")
        assert build_prompt(task, Sentence(("hi",))).text == "The formality of the text { hi } is :"

    def test_brace_token_passes_through(self):
        prompt = build_prompt(TASK, Sentence(("a", "{", "b")))
        assert prompt.text == "The sentiment of the text { a { b } is :"
        assert prompt.text.endswith(":")

    def test_injective_for_fixed_task(self):
        rng = random.Random(3)
        vocab = ["a", "b", "ab", "ba", "abc"]
        seen = {}
        for _ in range(200):
            tokens = tuple(rng.choice(vocab) for _ in range(rng.randint(1, 4)))
            rendered = build_prompt(TASK, Sentence(tokens)).text
            assert seen.setdefault(rendered, tokens) == tokens

    def test_candidate_verbatim_between_outer_braces(self):
        y = Sentence.from_text("x y z")
        text = build_prompt(TASK, y).text
        inner = text[text.index("{") + 1 : text.rindex("}")]
        assert inner.strip() == y.text()


def hand_lexicon() -> StyleLexicon:
    return StyleLexicon(
        entries={
            "good": ("positive", 2.0),
            "nice": ("positive", 1.0),
            "bad": ("negative", 2.0),
            "awful": ("negative", 1.0),
        }
    )


class TestLexiconBackend:
    def test_two_positive_hits_hand_computed(self):
        # Oracle: exact naive Bayes with Fractions.  V=4, totals 3/3,
        # uniform priors; sentence hits "good" and "nice".
        backend = LexiconBackend(hand_lexicon())
        probs = backend.style_probabilities(Sentence.from_text("good nice day"), TASK)
        p_pos = Fraction(3, 7) * Fraction(2, 7)
        p_neg = Fraction(1, 7) * Fraction(1, 7)
        expected_target = Fraction(p_pos, p_pos + p_neg)
        assert probs.p_target > probs.p_source
        assert math.isclose(probs.p_target, float(expected_target), rel_tol=1e-12)
        assert math.isclose(probs.p_source, float(1 - expected_target), rel_tol=1e-12)

    def test_no_hits_equal_priors_symmetric(self):
        backend = LexiconBackend(hand_lexicon())
        probs = backend.style_probabilities(Sentence.from_text("the weather today"), TASK)
        assert probs.p_source == probs.p_target == 0.5

    def test_each_occurrence_counts(self):
        backend = LexiconBackend(hand_lexicon())
        once = backend.style_probabilities(Sentence.from_text("good day"), TASK)
        twice = backend.style_probabilities(Sentence.from_text("good good day"), TASK)
        assert twice.p_target > once.p_target

    def test_unknown_style_word_is_config_error(self):
        backend = LexiconBackend(hand_lexicon())
        with pytest.raises(ConfigError):
            backend.style_probabilities(
                Sentence.from_text("good"), StyleTask("tone", "sarcastic", "sincere")
            )

    def test_adding_target_token_never_decreases_p_target(self):
        # Holds for label-balanced lexicons (equal total weight per label).
        rng = random.Random(11)
        for _ in range(100):
            n_pairs = rng.randint(1, 4)
            entries = {}
            for i in range(n_pairs):
                weight = rng.choice([0.5, 1.0, 2.0, 4.0])
                entries[f"p{i}"] = ("positive", weight)
                entries[f"n{i}"] = ("negative", weight)
            backend = LexiconBackend(StyleLexicon(entries))
            base_tokens = tuple(
                rng.choice(list(entries) + ["x", "y"]) for _ in range(rng.randint(1, 5))
            )
            target_token = f"p{rng.randrange(n_pairs)}"
            before = backend.style_probabilities(Sentence(base_tokens), TASK)
            after = backend.style_probabilities(Sentence(base_tokens + (target_token,)), TASK)
            assert after.p_target >= before.p_target - 1e-15


class TestStyleScore:
    def test_ratio_arithmetic(self):
        assert style_score(Sentence(("x",)), TASK, FixedBackend(0.3, 0.6)) == pytest.approx(2.0)

    def test_equal_probabilities_score_one(self):
        assert style_score(Sentence(("x",)), TASK, FixedBackend(0.4, 0.4)) == 1.0

    def test_zero_source_clamped(self):
        score = style_score(Sentence(("x",)), TASK, FixedBackend(0.0, 0.6))
        assert score == pytest.approx(0.6 / 1e-9)

    def test_remote_backend_echoes_server_values(self):
        class StubClient:
            def style(self, prompt, styles, exemplars=None):
                assert styles == (TASK.source_style, TASK.target_style)
                assert prompt.startswith("The sentiment of the text {")
                return 0.3, 0.6

        backend = RemoteStyleBackend(StubClient())
        probs = style_probabilities(Sentence.from_text("he loves sandwiches"), TASK, backend)
        assert (probs.p_source, probs.p_target) == (0.3, 0.6)

    def test_is_transferred_strict_boundary(self):
        assert is_transferred(Sentence(("x",)), TASK, FixedBackend(0.3, 0.6))
        assert not is_transferred(Sentence(("x",)), TASK, FixedBackend(0.4, 0.4))
        assert not is_transferred(Sentence(("x",)), TASK, FixedBackend(0.6, 0.3))

    def test_antisymmetry_swap_styles_gives_reciprocal(self):
        rng = random.Random(5)
        backend = LexiconBackend(hand_lexicon())
        vocab = ["good", "nice", "bad", "awful", "the", "day"]
        for _ in range(100):
            tokens = tuple(rng.choice(vocab) for _ in range(rng.randint(1, 6)))
            forward = style_score(Sentence(tokens), TASK, backend)
            backward = style_score(Sentence(tokens), TASK.reversed(), backend)
            assert math.isclose(backward, 1.0 / forward, rel_tol=1e-12)

    def test_invariant_under_uniform_rescaling(self):
        for scale in (0.1, 0.5, 3.0):
            base = style_score(Sentence(("x",)), TASK, FixedBackend(0.2, 0.3))
            scaled = style_score(
                Sentence(("x",)), TASK, FixedBackend(0.2 * scale / 3.0, 0.3 * scale / 3.0)
            )
            assert math.isclose(scaled, base, rel_tol=1e-12)


class TestLexiconFile:
    def test_load_entries_and_comments(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("# comment\ngood\tpositive\t2.0\n\nbad\tnegative\t1.5\n", encoding="utf-8")
        lexicon = StyleLexicon.load(path)
        assert lexicon.entries == {"good": ("positive", 2.0), "bad": ("negative", 1.5)}
        assert lexicon.priors == {"positive": 1.0, "negative": 1.0}

    def test_bad_field_count_rejected(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("good positive 2.0\n", encoding="utf-8")  # spaces, not tabs
        with pytest.raises(ConfigError):
            StyleLexicon.load(path)

    def test_bad_weight_rejected(self, tmp_path):
        path = tmp_path / "lex.tsv"
        path.write_text("good\tpositive\theavy\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            StyleLexicon.load(path)

    def test_non_positive_weight_rejected(self):
        with pytest.raises(ConfigError):
            StyleLexicon(entries={"good": ("positive", 0.0)})

    def test_missing_file_rejected(self, tmp_path):
        with pytest.raises(ConfigError):
            StyleLexicon.load(tmp_path / "absent.tsv")


class TestStyleProbabilities:
    def test_clamped_from_below(self):
        probs = StyleProbabilities(p_source=0.0, p_target=1.0)
        assert probs.p_source == 1e-9

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            StyleProbabilities(p_source=math.nan, p_target=0.5)
