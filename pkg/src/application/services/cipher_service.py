"""
Synthetic decipherment instances with known gold lexicons.

A plaintext corpus is enciphered by a word-level 1:1 substitution. In
cognate mode every word is replaced by a one-edit variant of itself, so
the orthographic feature carries signal; in opaque mode every word gets an
unrelated pronounceable nonce.
"""

import logging
from collections import Counter
import numpy as np
from Levenshtein import distance
from pydantic import BaseModel, ConfigDict

from src.domain.exceptions import GenerationError, ValidationError
from src.domain.models import UNK_TOKEN, CipherSpec, Corpus, GoldLexicon

logger = logging.getLogger(__name__)

MAX_RETRIES = 100
LETTERS = "abcdefghijklmnopqrstuvwxyz"
CONSONANTS = "bcdfghjklmnprstvz"
VOWELS = "aeiou"
# opaque nonces must be at least this far (normalized) from their plaintext word
OPAQUE_MIN_DISTANCE = 0.5


class CipherInstance(BaseModel):
    """Enciphered part, its plaintext, the held-out target part and the gold lexicon."""

    model_config = ConfigDict(frozen=True)

    source: Corpus
    plaintext: Corpus
    target: Corpus
    gold: GoldLexicon


def truncate_vocab(corpus: Corpus, limit: int) -> Corpus:
    """
    Keep the limit - 1 most frequent words and map the rest to the UNK token.

    Ties in frequency go to the word seen first. A corpus whose vocabulary
    already fits in limit words is returned unchanged.

    Raises:
        ValidationError: If limit < 2
    """
    if limit < 2:
        raise ValidationError(f"Vocabulary limit must be at least 2, got {limit}")
    counts = Counter(token for sentence in corpus.sentences for token in sentence)
    if len(counts) <= limit:
        return corpus
    first_seen = {word: i for i, word in enumerate(dict.fromkeys(t for s in corpus.sentences for t in s))}
    ranked = sorted(counts, key=lambda w: (-counts[w], first_seen[w]))
    kept = set(ranked[: limit - 1])
    sentences = tuple(tuple(t if t in kept else UNK_TOKEN for t in s) for s in corpus.sentences)
    logger.debug("Truncated vocabulary from %d to %d words", len(counts), limit)
    return Corpus(sentences=sentences, lang_tag=corpus.lang_tag)


def _cognate(word: str, rng: np.random.Generator) -> str:
    position = int(rng.integers(0, len(word) + 1))
    letter = LETTERS[int(rng.integers(0, len(LETTERS)))]
    if rng.random() < 0.5 or position == len(word):
        return word[:position] + letter + word[position:]
    return word[:position] + letter + word[position + 1 :]


def _nonce(word: str, rng: np.random.Generator) -> str:
    syllables = max(2, (len(word) + 1) // 2)
    parts = [
        CONSONANTS[int(rng.integers(0, len(CONSONANTS)))] + VOWELS[int(rng.integers(0, len(VOWELS)))]
        for _ in range(syllables)
    ]
    return "".join(parts)


def _acceptable(word: str, candidate: str, mode: str, used: set[str]) -> bool:
    if candidate == word or candidate in used:
        return False
    if mode == "opaque":
        return distance(word, candidate) / max(len(word), len(candidate)) > OPAQUE_MIN_DISTANCE
    return True


def make_cipher(target: Corpus, spec: CipherSpec) -> tuple[Corpus, GoldLexicon]:
    """
    Encipher a corpus with a random 1:1 word substitution.

    The vocabulary is first truncated to spec.vocab_limit when set. The UNK
    token enciphers to itself. Words are processed in first-occurrence
    order, so the same seed always gives the same instance.

    Args:
        target: Plaintext corpus
        spec: Cipher mode, seed and optional vocabulary limit

    Returns:
        The enciphered corpus and the gold lexicon (cipher word -> plain word)

    Raises:
        ValidationError: If the corpus is empty
        GenerationError: If a word finds no fresh cipher form in 100 tries
    """
    if target.num_tokens == 0:
        raise ValidationError("Cannot encipher an empty corpus")
    plain = truncate_vocab(target, spec.vocab_limit) if spec.vocab_limit is not None else target
    rng = np.random.default_rng(spec.rng_seed)
    forward: dict[str, str] = {}
    used: set[str] = set()
    for word in dict.fromkeys(t for s in plain.sentences for t in s):
        if word == UNK_TOKEN:
            forward[word] = word
            used.add(word)
            continue
        for _ in range(MAX_RETRIES):
            candidate = _cognate(word, rng) if spec.mode == "cognate" else _nonce(word, rng)
            if _acceptable(word, candidate, spec.mode, used):
                break
        else:
            raise GenerationError(f"No unused cipher form for '{word}' after {MAX_RETRIES} attempts")
        forward[word] = candidate
        used.add(candidate)

    source = Corpus(
        sentences=tuple(tuple(forward[t] for t in s) for s in plain.sentences),
        lang_tag=f"{plain.lang_tag}-cipher",
    )
    gold = GoldLexicon(mapping={cipher: word for word, cipher in forward.items()})
    logger.debug("Enciphered %d words in %s mode", len(gold), spec.mode)
    return source, gold


def split_disjoint(corpus: Corpus, ratio: float = 0.5) -> tuple[Corpus, Corpus]:
    """
    Split into a contiguous prefix and suffix.

    The prefix holds round(n * ratio) sentences, kept within [1, n - 1].

    Raises:
        ValidationError: If ratio is outside (0, 1) or the corpus has fewer than 2 sentences
    """
    if not 0.0 < ratio < 1.0:
        raise ValidationError(f"Split ratio must be in (0, 1), got {ratio}")
    n = corpus.num_sentences
    if n < 2:
        raise ValidationError(f"Need at least 2 sentences to split, got {n}")
    cut = min(max(round(n * ratio), 1), n - 1)
    return (
        Corpus(sentences=corpus.sentences[:cut], lang_tag=corpus.lang_tag),
        Corpus(sentences=corpus.sentences[cut:], lang_tag=corpus.lang_tag),
    )


def synthesize(corpus: Corpus, spec: CipherSpec, ratio: float = 0.5) -> CipherInstance:
    """
    Build a non-parallel instance from one plaintext corpus.

    The corpus is truncated (when spec.vocab_limit is set) and split; the
    first part is enciphered as the source side and the second part is the
    target side.
    """
    plain = truncate_vocab(corpus, spec.vocab_limit) if spec.vocab_limit is not None else corpus
    part_a, part_b = split_disjoint(plain, ratio)
    source, gold = make_cipher(part_a, spec.model_copy(update={"vocab_limit": None}))
    return CipherInstance(source=source, plaintext=part_a, target=part_b, gold=gold)
