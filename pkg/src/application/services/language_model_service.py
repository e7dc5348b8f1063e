"""
Target bigram language model: training, lookup and sampling.

The model is an add-k smoothed joint over ordered pairs,
p(e1 e2) = (count(e1 e2) + k) / (total + k * |V_E|^2).
"""

import numpy as np
from pydantic import ValidationError as PydanticValidationError

from src.application.factories.validation import convert_pydantic_error
from src.domain.exceptions import DegenerateModelError, ValidationError
from src.domain.language_model import BigramLM
from src.domain.models import BigramTable, Vocab

DEFAULT_SMOOTHING_K = 0.1


def train_bigram_lm(bigrams: BigramTable, vocab: Vocab, smoothing_k: float = DEFAULT_SMOOTHING_K) -> BigramLM:
    """
    Estimate the smoothed joint bigram distribution.

    Args:
        bigrams: Target bigram counts
        vocab: Target vocabulary
        smoothing_k: Pseudo-count added to every ordered pair

    Returns:
        The trained language model

    Raises:
        ValidationError: If k is negative or the vocabulary is empty
        DegenerateModelError: If there are no bigrams and k is 0
    """
    if smoothing_k < 0:
        raise ValidationError(f"Smoothing k must be non-negative, got {smoothing_k}")
    size = len(vocab)
    if size == 0:
        raise ValidationError("Cannot train a language model over an empty vocabulary")

    counts = np.zeros((size, size), dtype=np.float64)
    for (e1, e2), count in bigrams.entries.items():
        if e1 >= size or e2 >= size:
            raise ValidationError(f"Bigram ({e1}, {e2}) is outside the vocabulary")
        counts[e1, e2] = count

    denominator = bigrams.total_tokens + smoothing_k * size * size
    if denominator == 0:
        raise DegenerateModelError("Empty bigram table with k = 0 gives no probability mass")

    joint = (counts + smoothing_k) / denominator
    try:
        return BigramLM(vocab=vocab, joint=joint, smoothing_k=smoothing_k)
    except PydanticValidationError as e:
        raise convert_pydantic_error(e) from e


def lm_prob(lm: BigramLM, e1: int, e2: int) -> float:
    """
    Joint probability p(e1 e2).

    Raises:
        IndexError: If an id is out of range
    """
    if not (0 <= e1 < lm.size and 0 <= e2 < lm.size):
        raise IndexError(f"Word id out of range for vocabulary of size {lm.size}: ({e1}, {e2})")
    return float(lm.joint[e1, e2])


def sample_bigrams(lm: BigramLM, rng: np.random.Generator, size: int) -> tuple[np.ndarray, np.ndarray]:
    """
    Draw independent pairs from the joint by inverse CDF.

    Args:
        lm: Language model
        rng: Random source owned by the caller
        size: Number of pairs

    Returns:
        Arrays (e1, e2) of length size
    """
    flat = np.searchsorted(lm.cdf, rng.random(size), side="right")
    flat = np.minimum(flat, lm.size * lm.size - 1)
    return flat // lm.size, flat % lm.size


def sample_bigram(lm: BigramLM, rng: np.random.Generator) -> tuple[int, int]:
    """Draw one pair (e1, e2) distributed according to the joint."""
    e1, e2 = sample_bigrams(lm, rng, 1)
    return int(e1[0]), int(e2[0])
