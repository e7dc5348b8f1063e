"""Global test fixtures for the decipherment toolkit tests.

This module provides shared fixtures for corpora, vocabularies, language
models and small log-linear models used across the test modules.
"""

import logging
from collections.abc import Generator
from pathlib import Path

import numpy as np
import pytest

from src.application.factories.weight_factory import WeightFactory
from src.application.services.language_model_service import train_bigram_lm
from src.domain.features import FeatureSpace
from src.domain.language_model import BigramLM
from src.domain.loglinear import LogLinearModel
from src.domain.models import BigramTable, Corpus, FeatureConfig, Vocab
from tests.fixtures.test_data import (
    DecipherTestData,
    corpus_bigrams,
    cycle_lines,
    make_corpus,
    make_vocab,
    random_instance,
)


# Session-scoped fixtures for expensive resources
@pytest.fixture(scope="session")
def test_data() -> DecipherTestData:
    """Provide the shared word lists."""
    return DecipherTestData()


# Function-scoped fixtures for test isolation
@pytest.fixture(autouse=True)
def restore_root_logger() -> Generator[None, None, None]:
    """CLI runs install a RichHandler on the root logger; undo it after each test."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded random generator."""
    return np.random.default_rng(12345)


@pytest.fixture
def run_directory(tmp_path: Path) -> Generator[Path, None, None]:
    """Empty directory for run artifacts."""
    out = tmp_path / "run"
    out.mkdir()
    yield out


@pytest.fixture
def cycle_corpus() -> Corpus:
    """All rotations of the five-word cycle."""
    return make_corpus(cycle_lines(), lang_tag="en")


@pytest.fixture
def cycle_vocab(cycle_corpus: Corpus) -> Vocab:
    return corpus_bigrams(cycle_corpus)[0]


@pytest.fixture
def cycle_bigrams(cycle_corpus: Corpus) -> BigramTable:
    return corpus_bigrams(cycle_corpus)[1]


@pytest.fixture
def cycle_lm(cycle_bigrams: BigramTable, cycle_vocab: Vocab) -> BigramLM:
    """Smoothed LM that strongly favors the cycle transitions."""
    return train_bigram_lm(cycle_bigrams, cycle_vocab, smoothing_k=0.01)


@pytest.fixture
def cognate_space() -> FeatureSpace:
    """Feature space over a few Spanish/English cognates and one unrelated word."""
    vf = make_vocab(["minuto", "segundo", "hora", "perro"])
    ve = make_vocab(["dog", "minute", "second", "hour"])
    return WeightFactory.build_space(vf, ve, FeatureConfig())


@pytest.fixture
def cognate_model(cognate_space: FeatureSpace) -> LogLinearModel:
    """Log-linear model over the cognate space with seeded initial weights."""
    weights = WeightFactory.init_weights(cognate_space, FeatureConfig())
    ve = cognate_space.ve
    joint = np.full((len(ve), len(ve)), 1.0 / len(ve) ** 2)
    lm = BigramLM(vocab=ve, joint=joint, smoothing_k=0.0)
    return LogLinearModel(weights=weights, lm=lm, space=cognate_space)


@pytest.fixture
def oracle_instance() -> tuple[LogLinearModel, BigramTable]:
    """Random 3 x 4 log-linear instance small enough for exact enumeration."""
    return random_instance(seed=7, vf_size=3, ve_size=4)
