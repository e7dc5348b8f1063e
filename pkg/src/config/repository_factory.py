"""Repository factory with strategy pattern for model dumps."""

from pathlib import Path
from typing import Protocol

from src.infrastructure.persistence.repository import ModelRepository
from src.infrastructure.persistence.table_repository import TableRepository
from src.infrastructure.persistence.weight_repository import WeightRepository

WEIGHTS_FILE = "weights.tsv"
TABLE_FILE = "table.tsv"
LM_FILE = "lm.tsv"


class RunSettingsProtocol(Protocol):
    """Protocol for settings objects that can be used with the repository factory."""

    method: str
    output_dir: Path


def create_model_repository(settings: RunSettingsProtocol) -> ModelRepository:
    """Create the model repository that matches the training method.

    EM runs store a translation table; log-linear runs store weights.

    Args:
        settings: Settings object with method and output_dir attributes

    Returns:
        TableRepository or WeightRepository rooted in the output directory

    Raises:
        ValueError: If the method is not supported
    """
    if settings.method == "em":
        return TableRepository(Path(settings.output_dir) / TABLE_FILE)
    elif settings.method in ("ll-gibbs", "ll-imh", "ll-cd"):
        return WeightRepository(Path(settings.output_dir) / WEIGHTS_FILE)
    else:
        raise ValueError(f"Unsupported training method: {settings.method}")
