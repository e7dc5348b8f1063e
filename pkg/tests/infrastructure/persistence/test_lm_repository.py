"""
Tests for the bigram language-model dump.
"""

import numpy as np
import pytest

from src.domain.exceptions import ArtifactError
from src.infrastructure.persistence.lm_repository import SMOOTHING_HEADER, LanguageModelRepository
from tests.fixtures.test_data import make_vocab


class TestLanguageModelRepository:
    """Test suite for LanguageModelRepository"""

    def test_should_restore_joint_and_smoothing(self, tmp_path, cycle_lm, cycle_vocab):
        """Test that a saved LM reloads bit for bit."""
        # Arrange
        repository = LanguageModelRepository(tmp_path / "lm.tsv")

        # Act
        repository.save(cycle_lm)
        loaded = repository.load(cycle_vocab)

        # Assert
        np.testing.assert_array_equal(loaded.joint, cycle_lm.joint)
        assert loaded.smoothing_k == cycle_lm.smoothing_k
        assert repository.exists()

    def test_should_write_every_ordered_pair(self, tmp_path, cycle_lm, cycle_vocab):
        """The dump is dense: one header plus |V|^2 lines."""
        repository = LanguageModelRepository(tmp_path / "lm.tsv")

        repository.save(cycle_lm)

        lines = repository.file_path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == f"{SMOOTHING_HEADER}\t0.01"
        assert len(lines) == 1 + len(cycle_vocab) ** 2
        assert lines[1].split("\t")[:2] == [cycle_vocab.words[0], cycle_vocab.words[0]]

    def test_should_reject_unknown_words(self, tmp_path, cycle_lm):
        """Reloading over another vocabulary fails."""
        repository = LanguageModelRepository(tmp_path / "lm.tsv")
        repository.save(cycle_lm)

        with pytest.raises(ArtifactError, match="outside the vocabulary"):
            repository.load(make_vocab(["alpha", "zulu"]))

    def test_should_reject_unnormalized_joint(self, tmp_path):
        """A joint that does not sum to one is an artifact error."""
        path = tmp_path / "lm.tsv"
        path.write_text("a\ta\t0.5\na\tb\t0.1\n", encoding="utf-8")

        with pytest.raises(ArtifactError):
            LanguageModelRepository(path).load(make_vocab(["a", "b"]))

    def test_should_report_missing_dump(self, tmp_path, cycle_vocab):
        """No file means exists() is false and load fails."""
        repository = LanguageModelRepository(tmp_path / "absent.tsv")

        assert not repository.exists()
        with pytest.raises(ArtifactError):
            repository.load(cycle_vocab)
