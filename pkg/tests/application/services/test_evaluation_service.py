"""
Tests for lexicon extraction, accuracy, Viterbi decoding and BLEU.
"""

import itertools
import logging

import numpy as np
import pytest

from src.application.services.evaluation_service import (
    accuracy,
    bleu,
    decode_sentences,
    extract_lexicon,
    path_score,
    score_lexicon,
    viterbi_decode,
)
from src.domain.exceptions import CoverageError, OOVError, ValidationError
from src.domain.loglinear import EMModel
from src.domain.models import UNK_TOKEN, GoldLexicon, Lexicon, TranslationTable
from tests.fixtures.test_data import random_instance


@pytest.fixture
def em_instance(oracle_instance) -> EMModel:
    """EM model over the oracle vocabularies with a random translation table."""
    model, _ = oracle_instance
    rng = np.random.default_rng(21)
    table = TranslationTable(probs=rng.dirichlet(np.ones(len(model.vf)), size=len(model.ve)))
    return EMModel(table=table, lm=model.lm, vf=model.vf, ve=model.ve)


class TestExtractLexicon:
    """Test suite for extract_lexicon"""

    def test_should_take_argmax_of_potentials(self, cognate_model):
        """Log-linear lexicons follow the highest log-potential per source word."""
        cognate_model.weights.set(3, 0, 2.0)

        lex = extract_lexicon(cognate_model)

        assert lex.mapping["minuto"] == "minute"
        assert lex.mapping["perro"] == "dog"
        assert len(lex) == 4

    def test_should_break_ties_toward_lowest_target_id(self, cognate_model):
        """Rows of equal potentials map to the first target word."""
        lex = extract_lexicon(cognate_model)

        assert lex.mapping["hora"] == "dog"

    def test_should_take_argmax_over_targets_for_em(self, em_instance):
        """EM lexicons use argmax_e p(f | e)."""
        lex = extract_lexicon(em_instance)

        best = np.argmax(em_instance.table.probs, axis=0)
        assert lex.mapping == {f: em_instance.ve.words[int(e)] for f, e in zip(em_instance.vf.words, best, strict=True)}


class TestAccuracy:
    """Test suite for score_lexicon and accuracy"""

    def test_should_score_percentage_of_correct_entries(self):
        """Test accuracy over evaluated words, excluding UNK."""
        # Arrange
        lex = Lexicon(mapping={"a": "x", "b": "y", "c": "x", UNK_TOKEN: "x"})
        gold = GoldLexicon(mapping={"a": "x", "b": "z", "c": "x", UNK_TOKEN: UNK_TOKEN})

        # Act
        report = score_lexicon(lex, gold)

        # Assert
        assert report.correct == 2
        assert report.evaluated == 3
        assert report.accuracy == pytest.approx(200 / 3)
        assert accuracy(lex, gold) == report.accuracy

    def test_should_raise_coverage_error_for_missing_gold_entries(self):
        """Every evaluated word needs a gold translation."""
        with pytest.raises(CoverageError) as exc_info:
            score_lexicon(Lexicon(mapping={"a": "x", "b": "y"}), GoldLexicon(mapping={"a": "x"}))
        assert exc_info.value.missing == ["b"]

    def test_should_reject_empty_evaluation(self):
        """A lexicon holding only excluded words has nothing to score."""
        with pytest.raises(ValidationError):
            score_lexicon(Lexicon(mapping={UNK_TOKEN: UNK_TOKEN}), GoldLexicon(mapping={UNK_TOKEN: UNK_TOKEN}))


class TestViterbiDecode:
    """Test suite for viterbi_decode and path_score"""

    @pytest.mark.parametrize("use_em", [False, True])
    def test_should_find_highest_scoring_path(self, oracle_instance, em_instance, use_em):
        """Test Viterbi against brute force over every target path."""
        # Arrange
        model = em_instance if use_em else oracle_instance[0]
        sentence = ["fa", "fc", "fb"]

        # Act
        decoded = viterbi_decode(sentence, model)

        # Assert
        best = max(
            itertools.product(model.ve.words, repeat=len(sentence)),
            key=lambda path: path_score(sentence, path, model),
        )
        assert path_score(sentence, decoded, model) == pytest.approx(path_score(sentence, best, model))
        assert len(decoded) == len(sentence)

    def test_should_decode_single_token(self, oracle_instance):
        """A one-word sentence maximizes start score plus emission."""
        model, _ = oracle_instance
        theta = model.potentials()
        with np.errstate(divide="ignore"):
            expected = int(np.argmax(np.log(model.lm.marginal_e1) + theta[1]))

        assert viterbi_decode(["fb"], model) == [model.ve.words[expected]]

    def test_should_return_empty_path_for_empty_sentence(self, oracle_instance):
        """Nothing in, nothing out."""
        assert viterbi_decode([], oracle_instance[0]) == []

    def test_should_raise_on_unknown_token(self, oracle_instance):
        """Unknown source tokens raise OOVError."""
        with pytest.raises(OOVError) as exc_info:
            viterbi_decode(["fa", "nope"], oracle_instance[0])
        assert exc_info.value.token == "nope"


class TestDecodeSentences:
    """Test suite for decode_sentences"""

    def test_should_keep_input_order_for_any_thread_count(self):
        """Threaded decoding returns the same output in the same order."""
        model, _ = random_instance(seed=2, vf_size=5, ve_size=5, scale=1.0)
        rng = np.random.default_rng(0)
        sentences = [[model.vf.words[int(i)] for i in rng.integers(0, 5, size=6)] for _ in range(20)]

        single = decode_sentences(sentences, model, threads=1)
        multi = decode_sentences(sentences, model, threads=4)

        assert single == multi
        assert single[3] == viterbi_decode(sentences[3], model)

    def test_should_log_every_oov_line_and_raise_for_the_first(self, oracle_instance, caplog):
        """Test that all OOV lines are logged before the first raises."""
        # Arrange
        model, _ = oracle_instance
        sentences = [["fa"], ["zz", "fb"], ["fc"], ["qq"]]

        # Act
        with caplog.at_level(logging.WARNING), pytest.raises(OOVError) as exc_info:
            decode_sentences(sentences, model)

        # Assert
        assert exc_info.value.line_number == 2
        assert exc_info.value.token == "zz"
        assert "Line 2" in caplog.text
        assert "Line 4" in caplog.text


class TestBleu:
    """Test suite for corpus BLEU"""

    def test_should_score_identical_corpora_as_perfect(self):
        """Hypotheses equal to their references score 100."""
        refs = [["the", "cat", "sat", "down"], ["a", "dog", "barked", "loudly", "twice"]]
        assert bleu(refs, refs) == pytest.approx(100.0)

    def test_should_apply_brevity_penalty(self):
        """A perfect but short hypothesis is penalized by exp(1 - r / c)."""
        score = bleu([["a", "b", "c", "d"]], [["a", "b", "c", "d", "e"]])

        assert score == pytest.approx(100 * np.exp(1 - 5 / 4), abs=0.01)
        assert score == pytest.approx(77.88, abs=0.01)

    def test_should_cap_order_at_shortest_reference(self):
        """Two-word references are scored with bigrams at most."""
        assert bleu([["a", "b"]], [["a", "b"]]) == pytest.approx(100.0)

    def test_should_score_disjoint_output_as_zero(self):
        """No matching unigrams means zero BLEU."""
        assert bleu([["x", "y", "z"]], [["a", "b", "c"]]) == 0.0

    def test_should_depend_on_hypothesis_order(self):
        """Hypotheses are matched to references by position, so reordering them changes the score."""
        refs = [["the", "cat", "sat", "down"], ["a", "dog", "barked", "loudly", "twice"]]

        reordered = bleu(list(reversed(refs)), refs)

        assert reordered < bleu(refs, refs)
        assert reordered < 100.0

    @pytest.mark.parametrize("hyps,refs", [([], []), ([["a"]], []), ([["a"]], [["a"], ["b"]])])
    def test_should_reject_mismatched_inputs(self, hyps, refs):
        """BLEU needs one reference per hypothesis and at least one pair."""
        with pytest.raises(ValidationError):
            bleu(hyps, refs)
