"""Tests for the BigramLM value object and its derived arrays."""

import numpy as np
import pytest
from pydantic import ValidationError as PydanticValidationError

from src.domain.language_model import BigramLM
from tests.fixtures.test_data import make_vocab


class TestBigramLMValidation:
    """Test suite for joint validation"""

    def test_should_accept_normalized_joint(self):
        """A square joint summing to one over the vocab should validate"""
        vocab = make_vocab(["a", "b"])

        lm = BigramLM(vocab=vocab, joint=np.array([[0.1, 0.2], [0.3, 0.4]]))

        assert lm.size == 2
        assert lm.smoothing_k == 0.0

    @pytest.mark.parametrize(
        "joint,expected_error",
        [
            (np.array([[0.5, 0.5]]), "shape"),
            (np.array([[0.5, 0.6], [0.0, -0.1]]), "non-negative"),
            (np.array([[0.5, 0.5], [0.5, 0.5]]), "sum to 1"),
        ],
    )
    def test_should_reject_invalid_joint(self, joint, expected_error):
        """Wrong shapes, negative entries and unnormalized joints should fail"""
        with pytest.raises(PydanticValidationError) as exc_info:
            BigramLM(vocab=make_vocab(["a", "b"]), joint=joint)
        assert expected_error in str(exc_info.value)

    def test_should_reject_empty_vocabulary(self):
        """A language model needs at least one word"""
        with pytest.raises(PydanticValidationError):
            BigramLM(vocab=make_vocab([]), joint=np.zeros((0, 0)))

    def test_should_reject_zero_cells_when_smoothed(self):
        """Smoothing guarantees positive mass for every pair"""
        with pytest.raises(PydanticValidationError):
            BigramLM(vocab=make_vocab(["a", "b"]), joint=np.array([[0.5, 0.5], [0.0, 0.0]]), smoothing_k=0.1)


class TestBigramLMDerivedArrays:
    """Test suite for marginals, logs and the sampling CDF"""

    @pytest.fixture
    def sparse_lm(self) -> BigramLM:
        """LM where the second word never starts a pair."""
        return BigramLM(vocab=make_vocab(["a", "b"]), joint=np.array([[0.25, 0.75], [0.0, 0.0]]))

    def test_should_compute_first_word_marginal(self, sparse_lm):
        """marginal_e1 sums each row of the joint"""
        np.testing.assert_allclose(sparse_lm.marginal_e1, [1.0, 0.0])

    def test_should_map_zero_mass_to_negative_infinity(self, sparse_lm):
        """Log arrays hold -inf where the joint or the row marginal is zero"""
        assert np.isneginf(sparse_lm.log_joint[1, 0])
        assert np.isneginf(sparse_lm.log_conditional[1, 1])
        assert sparse_lm.log_conditional[0, 1] == pytest.approx(np.log(0.75))

    def test_should_end_cdf_at_one(self, sparse_lm):
        """The flattened CDF is monotone and ends exactly at 1"""
        assert sparse_lm.cdf[-1] == 1.0
        assert np.all(np.diff(sparse_lm.cdf) >= 0)
