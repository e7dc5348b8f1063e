"""Run configuration with Pydantic validation."""

import json
import os
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, Field, field_validator

from src.application.services.training_service import SamplerConfig
from src.domain.models import FeatureConfig

SEED_ENV_VAR = "DECIPHER_SEED"

Method = Literal["em", "ll-gibbs", "ll-imh", "ll-cd"]


class RunConfig(BaseModel):
    """Everything a train / evaluate / decode run needs."""

    source_path: Path = Field(description="Source (enciphered) corpus, one sentence per line")
    target_path: Path = Field(description="Target-language corpus used for the LM")
    gold_path: Path | None = Field(default=None, description="Gold lexicon TSV (f <TAB> e)")
    output_dir: Path = Field(default=Path("runs/default"), description="Directory for run artifacts")
    method: Method = Field(default="ll-cd")
    sampler: SamplerConfig = Field(default_factory=SamplerConfig)
    smoothing_k: float = Field(default=0.1, ge=0.0)
    ortho_enabled: bool = Field(default=True)
    ortho_threshold: float = Field(default=0.3, ge=0.0, le=1.0)
    strip_punct: bool = Field(default=True)
    threads: int = Field(default=1, ge=1)
    decode_input: Path | None = Field(default=None, description="Source sentences to decode after training")
    decode_reference: Path | None = Field(default=None, description="Reference translations for BLEU")

    @field_validator("source_path", "target_path", "gold_path", "decode_input", "decode_reference")
    @classmethod
    def validate_path_exists(cls, v: Path | None) -> Path | None:
        """Validate that referenced input files exist."""
        if v is not None and not v.is_file():
            raise ValueError(f"File not found: {v}")
        return v

    @property
    def iterations(self) -> int:
        return self.sampler.iterations

    def feature_config(self) -> FeatureConfig:
        return FeatureConfig(ortho_enabled=self.ortho_enabled, threshold=self.ortho_threshold)

    @classmethod
    def from_file(cls, config_path: str | Path) -> "RunConfig":
        """Load a run configuration from a JSON file.

        Args:
            config_path: Path to the JSON configuration file

        Returns:
            RunConfig instance with loaded configuration

        Raises:
            FileNotFoundError: If config file doesn't exist
            json.JSONDecodeError: If config file contains invalid JSON
            pydantic.ValidationError: If a field is invalid
        """
        return cls(**_read_json(config_path))

    @classmethod
    def load(cls, config_path: str | Path | None = None, overrides: dict[str, Any] | None = None) -> "RunConfig":
        """Build a configuration from flags, file and environment.

        Precedence is CLI overrides, then the config file, then the
        DECIPHER_SEED environment variable (seed only), then defaults.
        Override values of None are ignored; the "sampler" entry is merged
        field by field.

        Raises:
            FileNotFoundError: If config_path is given but missing
            json.JSONDecodeError: If the config file contains invalid JSON
            pydantic.ValidationError: If the merged configuration is invalid
        """
        data = _read_json(config_path) if config_path is not None else {}
        sampler = dict(data.get("sampler") or {})
        env_seed = os.environ.get(SEED_ENV_VAR)
        if "rng_seed" not in sampler and env_seed is not None:
            sampler["rng_seed"] = env_seed
        for key, value in (overrides or {}).items():
            if key == "sampler":
                sampler.update({k: v for k, v in value.items() if v is not None})
            elif value is not None:
                data[key] = value
        data["sampler"] = sampler
        return cls(**data)

    def with_overrides(self, **changes: Any) -> "RunConfig":
        """Copy with some fields replaced and revalidated."""
        return RunConfig(**{**self.model_dump(), **changes})


def _read_json(config_path: str | Path) -> dict[str, Any]:
    config_file = Path(config_path)
    if not config_file.exists():
        raise FileNotFoundError(f"Configuration file not found: {config_path}")
    with open(config_file, encoding="utf-8") as f:
        data = json.load(f)
    if not isinstance(data, dict):
        raise json.JSONDecodeError("Configuration must be a JSON object", str(config_path), 0)
    return data
