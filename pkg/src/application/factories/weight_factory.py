"""
Weight factory: feature space construction and weight initialization.

With the orthographic feature enabled, its weight starts at 1.0 and every
ortho-similar (f, e) pair is seeded with a small positive translation
weight. With it disabled, all weights start at zero and nothing is stored.
"""

import logging

import numpy as np
from pydantic import ValidationError as PydanticValidationError

from src.application.factories.validation import convert_pydantic_error
from src.domain.features import FeatureSpace, WeightVector
from src.domain.models import FeatureConfig, Vocab

logger = logging.getLogger(__name__)


class WeightFactory:
    """Factory for feature spaces and initial weight vectors."""

    @staticmethod
    def build_space(vf: Vocab, ve: Vocab, cfg: FeatureConfig | None = None) -> FeatureSpace:
        """
        Build the feature space, running the ortho seeding pass once.

        Args:
            vf: Source vocabulary
            ve: Target vocabulary
            cfg: Feature configuration

        Returns:
            Feature space with the precomputed ortho indicator
        """
        cfg = cfg or FeatureConfig()
        space = FeatureSpace(vf, ve, threshold=cfg.threshold, ortho_enabled=cfg.ortho_enabled)
        logger.debug("Ortho indicator fires on %d of %d pairs", int(space.ortho_mask.sum()), space.ortho_mask.size)
        return space

    @staticmethod
    def init_weights(space: FeatureSpace, cfg: FeatureConfig | None = None) -> WeightVector:
        """
        Create the initial weight vector.

        Args:
            space: Feature space (its ortho indicator selects the seeded pairs)
            cfg: Feature configuration with the initial values

        Returns:
            Weight vector seeded according to cfg
        """
        cfg = cfg or FeatureConfig()
        try:
            weights = WeightVector.zeros(space.shape, threshold=space.threshold)
        except PydanticValidationError as e:
            raise convert_pydantic_error(e) from e
        if not space.ortho_enabled:
            return weights
        f_ids, e_ids = np.nonzero(space.ortho_mask)
        weights.values[f_ids, e_ids] = cfg.seed_weight
        weights.include(f_ids, e_ids)
        weights.ortho_weight = cfg.ortho_init
        return weights

    @staticmethod
    def initialize(vf: Vocab, ve: Vocab, cfg: FeatureConfig | None = None) -> tuple[FeatureSpace, WeightVector]:
        """Build the feature space and the matching initial weights."""
        space = WeightFactory.build_space(vf, ve, cfg)
        return space, WeightFactory.init_weights(space, cfg)
