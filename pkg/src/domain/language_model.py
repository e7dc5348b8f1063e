"""Bigram language model over ordered target-word pairs."""

from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, ValidationInfo, field_validator, model_validator

from src.domain.models import Vocab


class BigramLM(BaseModel):
    """
    Joint distribution p(e1 e2) over ordered pairs of target words.

    The joint is stored densely as a |V_E| x |V_E| matrix. Derived arrays
    (first-word marginal, log joint, log conditional and the sampling CDF)
    are computed once after validation.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    vocab: Vocab
    joint: np.ndarray = Field(description="|V_E| x |V_E| joint probabilities")
    smoothing_k: float = Field(default=0.0, ge=0.0)

    _marginal_e1: np.ndarray = PrivateAttr()
    _log_joint: np.ndarray = PrivateAttr()
    _log_conditional: np.ndarray = PrivateAttr()
    _cdf: np.ndarray = PrivateAttr()

    @field_validator("joint")
    @classmethod
    def validate_joint(cls, v: np.ndarray, info: ValidationInfo) -> np.ndarray:
        """
        Validate shape and normalization of the joint.

        Raises:
            ValueError: If the joint is not a normalized square matrix over the vocab
        """
        vocab = info.data.get("vocab")
        if vocab is None or len(vocab) == 0:
            raise ValueError("Language model vocabulary must not be empty")
        size = len(vocab)
        joint = np.asarray(v, dtype=np.float64)
        if joint.shape != (size, size):
            raise ValueError(f"Joint must have shape ({size}, {size}), got {joint.shape}")
        if np.any(joint < 0) or not np.all(np.isfinite(joint)):
            raise ValueError("Joint probabilities must be finite and non-negative")
        if abs(float(joint.sum()) - 1.0) > 1e-9:
            raise ValueError("Joint probabilities must sum to 1")
        return joint

    @model_validator(mode="after")
    def validate_smoothing(self) -> "BigramLM":
        """A smoothed model gives every pair positive probability."""
        if self.smoothing_k > 0 and np.any(self.joint <= 0):
            raise ValueError("A smoothed model must give every pair positive probability")
        return self

    def model_post_init(self, __context: Any) -> None:
        joint = np.asarray(self.joint, dtype=np.float64)
        self._marginal_e1 = joint.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            self._log_joint = np.log(joint)
            conditional = np.log(joint) - np.log(self._marginal_e1)[:, None]
        self._log_conditional = np.where(np.isnan(conditional), -np.inf, conditional)
        cdf = np.cumsum(joint.ravel())
        self._cdf = cdf / cdf[-1]

    @property
    def size(self) -> int:
        return len(self.vocab)

    @property
    def marginal_e1(self) -> np.ndarray:
        """Distribution of the first word of a pair."""
        return self._marginal_e1

    @property
    def log_joint(self) -> np.ndarray:
        """Elementwise log of the joint (-inf where the joint is 0)."""
        return self._log_joint

    @property
    def log_conditional(self) -> np.ndarray:
        """log p(e2 | e1) with rows indexed by e1; -inf where undefined."""
        return self._log_conditional

    @property
    def cdf(self) -> np.ndarray:
        """Cumulative joint over the row-major flattened pairs, ending at exactly 1."""
        return self._cdf
