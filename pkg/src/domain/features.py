"""
Feature functions and weights of the log-linear model.

A source/target word pair (f, e) fires its own translation feature and,
when the two spellings are close, the shared orthographic feature.
Bigram features are the sum of the two unigram feature vectors.
"""

import numpy as np
from Levenshtein import distance
from pydantic import BaseModel, ConfigDict, Field

from src.domain.exceptions import ValidationError
from src.domain.models import Vocab

_KEY_SHIFT = np.int64(1) << np.int64(31)


def normalized_edit_distance(f: str, e: str) -> float:
    """
    Levenshtein distance over Unicode code points divided by the longer length.

    Args:
        f: Source token
        e: Target token

    Returns:
        Distance in [0, 1]

    Raises:
        ValidationError: If either token is empty
    """
    if not f or not e:
        raise ValidationError("Edit distance needs two non-empty tokens")
    return distance(f, e) / max(len(f), len(e))


def build_ortho_mask(vf: Vocab, ve: Vocab, threshold: float) -> np.ndarray:
    """
    Mark every (f, e) pair whose normalized edit distance is below threshold.

    Pairs whose length gap alone forces the distance to the threshold or
    beyond are skipped without computing the distance.

    Args:
        vf: Source vocabulary
        ve: Target vocabulary
        threshold: Strict upper bound on the normalized distance

    Returns:
        Boolean matrix of shape (|V_F|, |V_E|)
    """
    mask = np.zeros((len(vf), len(ve)), dtype=bool)
    target_lengths = [len(e) for e in ve.words]
    for i, f in enumerate(vf.words):
        f_len = len(f)
        for j, e in enumerate(ve.words):
            longest = max(f_len, target_lengths[j])
            if abs(f_len - target_lengths[j]) / longest >= threshold:
                continue
            if distance(f, e) / longest < threshold:
                mask[i, j] = True
    return mask


class FeatureSpace:
    """
    Vocabularies and the precomputed orthographic indicator.

    The indicator is computed once, at construction. With the ortho
    feature disabled it is identically false.
    """

    def __init__(self, vf: Vocab, ve: Vocab, threshold: float = 0.3, ortho_enabled: bool = True) -> None:
        """
        Initialize the feature space.

        Args:
            vf: Source vocabulary
            ve: Target vocabulary
            threshold: Ortho threshold in [0, 1]
            ortho_enabled: Whether the ortho feature exists

        Raises:
            ValidationError: If the threshold is outside [0, 1]
        """
        if not 0.0 <= threshold <= 1.0:
            raise ValidationError(f"Ortho threshold must be in [0, 1], got {threshold}")
        self.vf = vf
        self.ve = ve
        self.threshold = threshold
        self.ortho_enabled = ortho_enabled
        if ortho_enabled:
            self.ortho_mask = build_ortho_mask(vf, ve, threshold)
        else:
            self.ortho_mask = np.zeros((len(vf), len(ve)), dtype=bool)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.vf), len(self.ve)

    def is_ortho(self, f: int, e: int) -> bool:
        return bool(self.ortho_mask[f, e])


class FeatureVector(BaseModel):
    """Features fired by a single (f, e) word pair."""

    model_config = ConfigDict(frozen=True)

    translation_id: tuple[int, int] | None = None
    ortho_fired: bool = False


class FeatureCounts:
    """
    Sparse feature vector: translation-pair entries plus the ortho count.

    Entries are kept as aligned (f, e, value) arrays. Duplicate pairs are
    summed by coalesce(); pairs whose value cancels to zero are kept so
    that every touched pair stays visible.
    """

    __slots__ = ("e_ids", "f_ids", "ortho", "values")

    def __init__(
        self,
        f_ids: np.ndarray | None = None,
        e_ids: np.ndarray | None = None,
        values: np.ndarray | None = None,
        ortho: float = 0.0,
    ) -> None:
        self.f_ids = np.zeros(0, dtype=np.int64) if f_ids is None else np.asarray(f_ids, dtype=np.int64)
        self.e_ids = np.zeros(0, dtype=np.int64) if e_ids is None else np.asarray(e_ids, dtype=np.int64)
        self.values = np.zeros(0, dtype=np.float64) if values is None else np.asarray(values, dtype=np.float64)
        self.ortho = float(ortho)
        if not len(self.f_ids) == len(self.e_ids) == len(self.values):
            raise ValidationError("Feature id and value arrays must be aligned")

    @classmethod
    def from_pairs(
        cls, f_ids: np.ndarray, e_ids: np.ndarray, weights: np.ndarray | float, space: FeatureSpace
    ) -> "FeatureCounts":
        """
        Accumulate the features of many (f, e) pairs.

        Args:
            f_ids: Source ids
            e_ids: Target ids
            weights: Per-pair multiplier (or one scalar for all pairs)
            space: Feature space supplying the ortho indicator

        Returns:
            Coalesced feature counts
        """
        f_ids = np.asarray(f_ids, dtype=np.int64).ravel()
        e_ids = np.asarray(e_ids, dtype=np.int64).ravel()
        values = np.broadcast_to(np.asarray(weights, dtype=np.float64), f_ids.shape).ravel()
        ortho = float(np.dot(values, space.ortho_mask[f_ids, e_ids]))
        return cls(f_ids, e_ids, values.copy(), ortho).coalesce()

    @classmethod
    def from_dense(cls, matrix: np.ndarray, ortho: float) -> "FeatureCounts":
        """Build counts from a dense |V_F| x |V_E| matrix, keeping its non-zero cells."""
        f_ids, e_ids = np.nonzero(matrix)
        return cls(f_ids, e_ids, matrix[f_ids, e_ids], ortho)

    def coalesce(self) -> "FeatureCounts":
        """Return counts with duplicate pairs summed, ordered by (f, e)."""
        if len(self.values) == 0:
            return FeatureCounts(ortho=self.ortho)
        keys = self.f_ids * _KEY_SHIFT + self.e_ids
        unique, inverse = np.unique(keys, return_inverse=True)
        summed = np.bincount(inverse.ravel(), weights=self.values, minlength=len(unique))
        return FeatureCounts(unique // _KEY_SHIFT, unique % _KEY_SHIFT, summed, self.ortho)

    def scaled(self, factor: float) -> "FeatureCounts":
        return FeatureCounts(self.f_ids, self.e_ids, self.values * factor, self.ortho * factor)

    def __add__(self, other: "FeatureCounts") -> "FeatureCounts":
        return FeatureCounts(
            np.concatenate([self.f_ids, other.f_ids]),
            np.concatenate([self.e_ids, other.e_ids]),
            np.concatenate([self.values, other.values]),
            self.ortho + other.ortho,
        ).coalesce()

    def __sub__(self, other: "FeatureCounts") -> "FeatureCounts":
        return self + other.scaled(-1.0)

    def to_dict(self) -> dict[tuple[int, int], float]:
        merged = self.coalesce()
        return {
            (int(f), int(e)): float(v) for f, e, v in zip(merged.f_ids, merged.e_ids, merged.values, strict=True)
        }

    def to_dense(self, shape: tuple[int, int]) -> np.ndarray:
        dense = np.zeros(shape, dtype=np.float64)
        np.add.at(dense, (self.f_ids, self.e_ids), self.values)
        return dense

    def get(self, f: int, e: int) -> float:
        return self.to_dict().get((f, e), 0.0)

    def dot(self, weights: "WeightVector") -> float:
        """Inner product with a weight vector."""
        translation = float(np.dot(self.values, weights.values[self.f_ids, self.e_ids]))
        return translation + self.ortho * weights.ortho_weight

    def norm(self) -> float:
        """L2 norm over translation entries and the ortho count."""
        merged = self.coalesce()
        return float(np.sqrt(np.dot(merged.values, merged.values) + merged.ortho**2))

    def __len__(self) -> int:
        return len(self.values)


class WeightVector(BaseModel):
    """
    Model parameters w: sparse translation weights plus one ortho weight.

    Translation weights live in a dense |V_F| x |V_E| array; the support
    mask marks the pairs that are part of the sparse vector (seeded at
    initialization or observed during sampling). Cells outside the support
    are always zero.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, validate_assignment=True)

    values: np.ndarray
    support: np.ndarray
    ortho_weight: float = 0.0
    threshold: float = Field(default=0.3, ge=0.0, le=1.0, frozen=True)

    @classmethod
    def zeros(cls, shape: tuple[int, int], threshold: float = 0.3) -> "WeightVector":
        """Create an all-zero weight vector with empty support."""
        return cls(
            values=np.zeros(shape, dtype=np.float64),
            support=np.zeros(shape, dtype=bool),
            ortho_weight=0.0,
            threshold=threshold,
        )

    @property
    def shape(self) -> tuple[int, int]:
        rows, cols = self.values.shape
        return int(rows), int(cols)

    @property
    def translation_weights(self) -> dict[tuple[int, int], float]:
        """The sparse map (f, e) -> weight over the support."""
        f_ids, e_ids = np.nonzero(self.support)
        return {
            (int(f), int(e)): float(self.values[f, e]) for f, e in zip(f_ids, e_ids, strict=True)
        }

    @property
    def n_weights(self) -> int:
        """Number of stored translation weights."""
        return int(np.count_nonzero(self.support))

    def get(self, f: int, e: int) -> float:
        return float(self.values[f, e])

    def set(self, f: int, e: int, value: float) -> None:
        self.values[f, e] = value
        self.support[f, e] = True

    def include(self, f_ids: np.ndarray, e_ids: np.ndarray) -> None:
        """Add pairs to the support; new pairs start at weight 0."""
        self.support[f_ids, e_ids] = True

    def apply(self, delta: FeatureCounts, scale: float = 1.0) -> None:
        """
        Add scale * delta in place.

        Every pair present in delta joins the support, including pairs
        whose value is zero.
        """
        np.add.at(self.values, (delta.f_ids, delta.e_ids), scale * delta.values)
        self.support[delta.f_ids, delta.e_ids] = True
        self.ortho_weight = self.ortho_weight + scale * delta.ortho

    def is_finite_at(self, f_ids: np.ndarray, e_ids: np.ndarray) -> bool:
        """Check the ortho weight and the given cells for NaN or infinity."""
        if not np.isfinite(self.ortho_weight):
            return False
        return bool(np.all(np.isfinite(self.values[f_ids, e_ids])))

    def copy(self) -> "WeightVector":
        return WeightVector(
            values=self.values.copy(),
            support=self.support.copy(),
            ortho_weight=self.ortho_weight,
            threshold=self.threshold,
        )


def phi(f: int, e: int, space: FeatureSpace) -> FeatureVector:
    """
    Unigram features of the pair (f, e).

    Args:
        f: Source word id
        e: Target word id
        space: Feature space with the ortho indicator

    Returns:
        The fired translation key and ortho flag
    """
    return FeatureVector(translation_id=(f, e), ortho_fired=space.is_ortho(f, e))


def bigram_phi(f_pair: tuple[int, int], e_pair: tuple[int, int], space: FeatureSpace) -> FeatureCounts:
    """Phi(f1 f2, e1 e2) = phi(f1, e1) + phi(f2, e2)."""
    return FeatureCounts.from_pairs(np.array(f_pair), np.array(e_pair), 1.0, space)


def score(
    weights: WeightVector, space: FeatureSpace, f_pair: tuple[int, int], e_pair: tuple[int, int]
) -> float:
    """w . Phi(f1 f2, e1 e2); pairs outside the support contribute 0."""
    total = 0.0
    for f, e in zip(f_pair, e_pair, strict=True):
        total += weights.values[f, e]
        if space.ortho_mask[f, e]:
            total += weights.ortho_weight
    return float(total)
