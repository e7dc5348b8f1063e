"""
Domain models for the decipherment toolkit.

This module contains the core value objects shared by the services:
corpora and vocabularies, bigram count tables, the EM translation table,
lexicons and the per-iteration training records.
"""

from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator

UNK_TOKEN = "<unk>"


class Corpus(BaseModel):
    """
    Tokenized monolingual text.

    Sentences keep their input order. Every token is a non-empty,
    lowercase string without whitespace.
    """

    model_config = ConfigDict(frozen=True)

    sentences: tuple[tuple[str, ...], ...] = Field(default=(), description="Tokenized sentences in input order")
    lang_tag: str = Field(default="und", description="Opaque language label")

    @field_validator("sentences")
    @classmethod
    def validate_tokens(cls, v: tuple[tuple[str, ...], ...]) -> tuple[tuple[str, ...], ...]:
        """
        Validate that every token is non-empty, lowercase and whitespace free.

        Args:
            v: The sentences to validate

        Returns:
            The validated sentences

        Raises:
            ValueError: If a token breaks the token invariants
        """
        for index, sentence in enumerate(v, start=1):
            for token in sentence:
                if not token:
                    raise ValueError(f"Sentence {index} contains an empty token")
                if token != token.lower():
                    raise ValueError(f"Token '{token}' in sentence {index} is not lowercase")
                if any(ch.isspace() for ch in token):
                    raise ValueError(f"Token '{token}' in sentence {index} contains whitespace")
        return v

    @property
    def num_sentences(self) -> int:
        """Number of sentences in the corpus."""
        return len(self.sentences)

    @property
    def num_tokens(self) -> int:
        """Number of tokens over all sentences."""
        return sum(len(sentence) for sentence in self.sentences)


class Vocab(BaseModel):
    """
    Ordered set of distinct tokens with dense ids.

    Ids follow insertion order, which is first-occurrence order when the
    vocabulary is built from a corpus.
    """

    model_config = ConfigDict(frozen=True)

    words: tuple[str, ...] = Field(default=(), description="Distinct tokens in id order")
    _index: dict[str, int] = PrivateAttr(default_factory=dict)

    @field_validator("words")
    @classmethod
    def validate_distinct(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        """Reject duplicate words, which would break the word/id bijection."""
        if len(set(v)) != len(v):
            raise ValueError("Vocabulary words must be distinct")
        return v

    def model_post_init(self, __context: Any) -> None:
        """Build the token to id index."""
        self._index = {word: i for i, word in enumerate(self.words)}

    @property
    def index(self) -> dict[str, int]:
        """Mapping from token to dense id."""
        return self._index

    def id_of(self, word: str) -> int:
        """
        Look up the id of a word.

        Args:
            word: Token to look up

        Returns:
            The dense id of the token

        Raises:
            KeyError: If the word is not in the vocabulary
        """
        return self._index[word]

    def __contains__(self, word: object) -> bool:
        return word in self._index

    def __len__(self) -> int:
        return len(self.words)


class BigramTable(BaseModel):
    """
    Counts of unique adjacent token pairs.

    Keys are (first id, second id); the number of keys is the number of
    unique bigrams and total_tokens is the sum of all counts.
    """

    model_config = ConfigDict(frozen=True)

    entries: dict[tuple[int, int], int] = Field(default_factory=dict, description="Bigram id pair to count")
    total_tokens: int = Field(default=0, ge=0, description="Sum of all bigram counts")

    @field_validator("entries")
    @classmethod
    def validate_counts(cls, v: dict[tuple[int, int], int]) -> dict[tuple[int, int], int]:
        """Every stored bigram must have been seen at least once."""
        for key, count in v.items():
            if count < 1:
                raise ValueError(f"Bigram {key} has non-positive count {count}")
        return v

    @model_validator(mode="after")
    def validate_total(self) -> "BigramTable":
        """total_tokens must equal the sum of the counts."""
        if sum(self.entries.values()) != self.total_tokens:
            raise ValueError("total_tokens must equal the sum of bigram counts")
        return self

    @property
    def unique_count(self) -> int:
        """Number of distinct bigrams."""
        return len(self.entries)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Return the table as aligned id and count arrays.

        Returns:
            Tuple (first ids, second ids, counts) in insertion order
        """
        if not self.entries:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty.copy(), empty.copy()
        keys = np.array(list(self.entries.keys()), dtype=np.int64)
        counts = np.fromiter(self.entries.values(), dtype=np.int64, count=len(self.entries))
        return keys[:, 0].copy(), keys[:, 1].copy(), counts


class TranslationTable(BaseModel):
    """
    Dense p(f|e) table of the EM baseline.

    Row e is a distribution over source words and sums to one.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    probs: np.ndarray = Field(description="|V_E| x |V_F| matrix of p(f|e)")

    @field_validator("probs")
    @classmethod
    def validate_rows(cls, v: np.ndarray) -> np.ndarray:
        """
        Validate shape, sign and row normalization.

        Args:
            v: The probability matrix

        Returns:
            The matrix as a float array

        Raises:
            ValueError: If the matrix is not row-stochastic
        """
        probs = np.asarray(v, dtype=np.float64)
        if probs.ndim != 2 or probs.shape[0] == 0 or probs.shape[1] == 0:
            raise ValueError("Translation table must be a non-empty 2-D matrix")
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise ValueError("Translation probabilities must be finite and non-negative")
        if not np.allclose(probs.sum(axis=1), 1.0, rtol=0.0, atol=1e-9):
            raise ValueError("Each translation table row must sum to 1")
        return probs

    @property
    def target_size(self) -> int:
        """Number of target words (rows)."""
        return int(self.probs.shape[0])

    @property
    def source_size(self) -> int:
        """Number of source words (columns)."""
        return int(self.probs.shape[1])


class FeatureConfig(BaseModel):
    """Switches and constants of the feature space and its initialization."""

    ortho_enabled: bool = Field(default=True, description="Whether the orthographic feature exists")
    threshold: float = Field(default=0.3, ge=0.0, le=1.0, description="Edit-distance threshold of the ortho feature")
    ortho_init: float = Field(default=1.0, description="Initial weight of the ortho feature")
    seed_weight: float = Field(default=0.1, description="Initial weight of ortho-similar translation pairs")


class Lexicon(BaseModel):
    """Source word to target word mapping extracted from a model."""

    mapping: dict[str, str] = Field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.mapping)


class GoldLexicon(BaseModel):
    """Reference source to target mapping used for scoring."""

    mapping: dict[str, str] = Field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.mapping)


class CipherSpec(BaseModel):
    """Parameters of a synthetic cipher instance."""

    mode: Literal["opaque", "cognate"] = Field(default="cognate")
    rng_seed: int = Field(default=0, ge=0)
    vocab_limit: int | None = Field(default=None, ge=2)


class IterationRecord(BaseModel):
    """Measurements of one training iteration."""

    iteration: int = Field(ge=1)
    seconds: float = Field(ge=0.0)
    grad_norm: float | None = None
    accept_rate: float | None = None
    n_weights: int = Field(default=0, ge=0)
    log_likelihood: float | None = None

    def trace_entry(self) -> dict[str, Any]:
        """Deterministic fields of the record, without wall-clock time."""
        entry: dict[str, Any] = {
            "iter": self.iteration,
            "grad_norm": self.grad_norm,
            "accept_rate": self.accept_rate,
            "n_weights": self.n_weights,
        }
        if self.log_likelihood is not None:
            entry["log_likelihood"] = self.log_likelihood
        return entry

    def stream_entry(self) -> dict[str, Any]:
        """Progress line emitted while training runs."""
        return {
            "iter": self.iteration,
            "seconds": self.seconds,
            "grad_norm": self.grad_norm,
            "accept_rate": self.accept_rate,
            "n_weights": self.n_weights,
        }


class TrainRecord(BaseModel):
    """Per-iteration history of a training run."""

    method: str
    iterations: list[IterationRecord] = Field(default_factory=list)

    def append(self, record: IterationRecord) -> None:
        """Add the record of the next iteration."""
        self.iterations.append(record)

    @property
    def seconds(self) -> list[float]:
        """Wall time of every iteration."""
        return [r.seconds for r in self.iterations]

    @property
    def grad_norms(self) -> list[float | None]:
        """Gradient norm of every iteration."""
        return [r.grad_norm for r in self.iterations]

    @property
    def accept_rates(self) -> list[float | None]:
        """IMH acceptance rate of every iteration (None for non-IMH methods)."""
        return [r.accept_rate for r in self.iterations]

    @property
    def weight_counts(self) -> list[int]:
        """Size of the weight vector after every iteration."""
        return [r.n_weights for r in self.iterations]

    @property
    def log_likelihoods(self) -> list[float]:
        """Log-likelihood trace, recorded by EM only."""
        return [r.log_likelihood for r in self.iterations if r.log_likelihood is not None]

    @property
    def seconds_total(self) -> float:
        return float(sum(self.seconds))

    @property
    def seconds_per_iter(self) -> float:
        if not self.iterations:
            return 0.0
        return self.seconds_total / len(self.iterations)
