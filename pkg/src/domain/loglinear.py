"""
Trained decipherment models.

LogLinearModel is the MRF joint p(f1f2, e1e2) proportional to
exp(w . Phi) * p(e1e2). EMModel wraps the generative baseline's translation
table. Both carry the vocabularies and the target bigram LM they were
trained against.
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from src.domain.features import FeatureSpace, WeightVector, score
from src.domain.language_model import BigramLM
from src.domain.models import TranslationTable, Vocab


class LogLinearModel(BaseModel):
    """
    Log-linear decipherment model.

    The log-potential of a word pair is
    theta[f, e] = w_translation(f, e) + ortho_weight * ortho(f, e),
    so the unnormalized joint of a bigram pair is
    p(e1 e2) * exp(theta[f1, e1] + theta[f2, e2]).
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    weights: WeightVector
    lm: BigramLM
    space: FeatureSpace

    @model_validator(mode="after")
    def validate_shapes(self) -> "LogLinearModel":
        """Weights, feature space and LM must agree on vocabulary sizes."""
        if self.weights.shape != self.space.shape:
            raise ValueError(f"Weight shape {self.weights.shape} does not match feature space {self.space.shape}")
        if self.lm.size != len(self.space.ve):
            raise ValueError("Language model vocabulary does not match the target vocabulary")
        if self.weights.threshold != self.space.threshold:
            raise ValueError("Weight threshold differs from the feature space threshold")
        return self

    @property
    def vf(self) -> Vocab:
        return self.space.vf

    @property
    def ve(self) -> Vocab:
        return self.space.ve

    def potentials(self) -> np.ndarray:
        """Dense |V_F| x |V_E| matrix of log-potentials theta."""
        return self.weights.values + self.weights.ortho_weight * self.space.ortho_mask

    def potential_rows(self, f_ids: np.ndarray) -> np.ndarray:
        """theta[f, :] for each f in f_ids; shape (len(f_ids), |V_E|)."""
        return self.weights.values[f_ids] + self.weights.ortho_weight * self.space.ortho_mask[f_ids]

    def potential_cols(self, e_ids: np.ndarray) -> np.ndarray:
        """theta[:, e] for each e in e_ids; shape (|V_F|, len(e_ids))."""
        return self.weights.values[:, e_ids] + self.weights.ortho_weight * self.space.ortho_mask[:, e_ids]

    def potential_at(self, f_ids: np.ndarray, e_ids: np.ndarray) -> np.ndarray:
        """theta at aligned (f, e) pairs."""
        return self.weights.values[f_ids, e_ids] + self.weights.ortho_weight * self.space.ortho_mask[f_ids, e_ids]

    def score(self, f_pair: tuple[int, int], e_pair: tuple[int, int]) -> float:
        return score(self.weights, self.space, f_pair, e_pair)

    def log_unnorm_joint(self, f_pair: tuple[int, int], e_pair: tuple[int, int]) -> float:
        """log p(e1 e2) + w . Phi; -inf when the LM gives the pair no mass."""
        return float(self.lm.log_joint[e_pair[0], e_pair[1]]) + self.score(f_pair, e_pair)


class EMModel(BaseModel):
    """Generative baseline: translation table p(f|e) plus the target LM."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    table: TranslationTable
    lm: BigramLM
    vf: Vocab
    ve: Vocab

    @model_validator(mode="after")
    def validate_shapes(self) -> "EMModel":
        """The table must be |V_E| x |V_F|."""
        if (self.table.target_size, self.table.source_size) != (len(self.ve), len(self.vf)):
            raise ValueError("Translation table shape does not match the vocabularies")
        if self.lm.size != len(self.ve):
            raise ValueError("Language model vocabulary does not match the target vocabulary")
        return self

    def log_emissions(self, f_ids: np.ndarray) -> np.ndarray:
        """log p(f | e) for each f in f_ids; shape (len(f_ids), |V_E|)."""
        with np.errstate(divide="ignore"):
            return np.log(self.table.probs[:, f_ids].T)


DecipherModel = LogLinearModel | EMModel
