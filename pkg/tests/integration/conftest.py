"""Integration test fixtures and utilities."""

from collections.abc import Callable
from pathlib import Path

import pytest

from src.application.services.pipeline_service import DecipherPipeline
from src.application.services.training_service import SamplerConfig
from src.config.repository_factory import LM_FILE, create_model_repository
from src.config.settings import RunConfig
from src.infrastructure.persistence.lm_repository import LanguageModelRepository
from src.infrastructure.persistence.report_repository import ReportRepository
from tests.fixtures.test_data import CipherFiles, write_cipher_instance, write_lines

# Prefixes of one fixed word path: bigram counts 3:2:1 along the path, so
# the only bigram-preserving relabeling is the identity.
PATH_WORDS = ["alpha", "bravo", "charlie", "delta"]
HELD_OUT = ["bravo charlie delta", "alpha bravo", "charlie delta", "alpha bravo charlie delta"]


@pytest.fixture(scope="session")
def cipher_instance(tmp_path_factory) -> CipherFiles:
    """Shared cognate instance; tests must not modify its files."""
    return write_cipher_instance(tmp_path_factory.mktemp("cipher"), n_sentences=60, vocab_size=15)


@pytest.fixture
def make_config(cipher_instance: CipherFiles, tmp_path: Path) -> Callable[..., RunConfig]:
    """Build a quick RunConfig over the shared instance, writing under tmp_path."""

    def factory(name: str = "run", **changes) -> RunConfig:
        sampler = SamplerConfig(**{"n_samples": 4, "iterations": 3, "rng_seed": 11, **changes.pop("sampler", {})})
        values = {
            "source_path": cipher_instance.source,
            "target_path": cipher_instance.target,
            "gold_path": cipher_instance.gold,
            "output_dir": tmp_path / name,
            "sampler": sampler,
            **changes,
        }
        return RunConfig(**values)

    return factory


def build_pipeline(cfg: RunConfig) -> DecipherPipeline:
    """Pipeline wired to the file repositories, as the CLI does it."""
    return DecipherPipeline(
        cfg,
        create_model_repository(cfg),
        ReportRepository(cfg.output_dir),
        LanguageModelRepository(cfg.output_dir / LM_FILE),
    )


@pytest.fixture(scope="session")
def identity_instance(tmp_path_factory) -> dict[str, Path]:
    """
    Identity cipher over path prefixes plus held-out sentences to decode.

    Source and target are the same text, so the gold lexicon is the identity.
    """
    root = tmp_path_factory.mktemp("identity")
    lines = [" ".join(PATH_WORDS[: i + 1]) for i in range(1, len(PATH_WORDS))] * 5
    files = {name: root / f"{name}.txt" for name in ("source", "target", "held_out", "reference")}
    write_lines(files["source"], lines)
    write_lines(files["target"], lines)
    write_lines(files["held_out"], HELD_OUT)
    write_lines(files["reference"], HELD_OUT)
    files["gold"] = root / "gold.tsv"
    write_lines(files["gold"], (f"{w}\t{w}" for w in PATH_WORDS))
    return files
