"""
Repository interface for trained model persistence.

This module defines the abstract repository interface for saving and
loading trained models without coupling the application layer to a
specific file format.
"""

from abc import ABC, abstractmethod
from pathlib import Path

from src.domain.features import FeatureSpace
from src.domain.language_model import BigramLM
from src.domain.loglinear import DecipherModel


class ModelRepository(ABC):
    """
    Abstract repository interface for trained models.

    A model is stored without its vocabularies or language model; loading
    needs the feature space and LM rebuilt from the same corpora.
    """

    def __init__(self, file_path: Path) -> None:
        """
        Initialize the repository with its artifact path.

        Args:
            file_path: Path of the model dump
        """
        self.file_path = Path(file_path)

    @abstractmethod
    def save(self, model: DecipherModel) -> None:
        """
        Persist a trained model.

        Args:
            model: The model to save

        Raises:
            ValidationError: If the model type does not fit this repository
            ArtifactError: If the file cannot be written
        """
        pass

    @abstractmethod
    def load(self, lm: BigramLM, space: FeatureSpace) -> DecipherModel:
        """
        Load a model over the given vocabularies.

        Args:
            lm: Target language model the model was trained with
            space: Feature space holding both vocabularies

        Returns:
            The reconstructed model

        Raises:
            ArtifactError: If the dump is missing, malformed or names unknown words
        """
        pass

    def exists(self) -> bool:
        """Check whether a dump is present."""
        return self.file_path.is_file()
