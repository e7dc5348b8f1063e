"""
Corpus factory: ingestion of monolingual text.

This module turns UTF-8 text (one sentence per line) into validated
Corpus objects, and derives vocabularies and unique-bigram count tables
from them.
"""

import logging
import unicodedata
from collections.abc import Iterable
from pathlib import Path

from pydantic import BaseModel, Field
from pydantic import ValidationError as PydanticValidationError

from src.application.factories.validation import convert_pydantic_error
from src.domain.exceptions import ArtifactError, ConsistencyError, CorpusDecodeError, ValidationError
from src.domain.models import BigramTable, Corpus, Vocab

logger = logging.getLogger(__name__)


class TokenizationOptions(BaseModel):
    """Options controlling how lines are split into tokens."""

    strip_punct: bool = Field(default=True, description="Strip leading/trailing punctuation and drop bare punctuation")


def _is_punctuation(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def _strip_punctuation(token: str) -> str:
    start, end = 0, len(token)
    while start < end and _is_punctuation(token[start]):
        start += 1
    while end > start and _is_punctuation(token[end - 1]):
        end -= 1
    return token[start:end]


class CorpusFactory:
    """
    Factory for corpora, vocabularies and bigram tables.

    All methods are pure; the objects they return are immutable.
    """

    @staticmethod
    def tokenize(line: str, opts: TokenizationOptions | None = None) -> list[str]:
        """
        Split a line on whitespace, lowercase it and optionally strip punctuation.

        Args:
            line: One sentence of raw text
            opts: Tokenization options (defaults strip punctuation)

        Returns:
            The tokens of the line, possibly empty
        """
        opts = opts or TokenizationOptions()
        tokens = [token.lower() for token in line.split()]
        if opts.strip_punct:
            tokens = [_strip_punctuation(token) for token in tokens]
        return [token for token in tokens if token]

    @staticmethod
    def load_corpus(
        reader: Iterable[bytes] | Iterable[str], opts: TokenizationOptions | None = None, lang_tag: str = "und"
    ) -> Corpus:
        """
        Read one sentence per line and build a Corpus.

        Byte lines are decoded as UTF-8; text streams must already be opened
        with the UTF-8 codec. Empty lines, and lines that lose every token to
        punctuation stripping, are skipped.

        Args:
            reader: Binary or text line iterator
            opts: Tokenization options
            lang_tag: Label stored on the corpus

        Returns:
            The tokenized corpus

        Raises:
            CorpusDecodeError: If a line is not valid UTF-8
            ValidationError: If the resulting corpus breaks the token invariants
        """
        sentences: list[tuple[str, ...]] = []
        line_number = 0
        iterator = iter(reader)
        while True:
            line_number += 1
            try:
                raw = next(iterator)
            except StopIteration:
                break
            except UnicodeDecodeError as e:
                raise CorpusDecodeError(line_number, str(e)) from e
            if isinstance(raw, bytes):
                try:
                    line = raw.decode("utf-8")
                except UnicodeDecodeError as e:
                    raise CorpusDecodeError(line_number, str(e)) from e
            else:
                line = raw
            tokens = CorpusFactory.tokenize(line, opts)
            if tokens:
                sentences.append(tuple(tokens))

        try:
            corpus = Corpus(sentences=tuple(sentences), lang_tag=lang_tag)
        except PydanticValidationError as e:
            raise convert_pydantic_error(e) from e
        logger.debug("Loaded %d sentences (%d tokens) for '%s'", corpus.num_sentences, corpus.num_tokens, lang_tag)
        return corpus

    @staticmethod
    def load_corpus_file(path: Path, opts: TokenizationOptions | None = None, lang_tag: str = "und") -> Corpus:
        """
        Load a corpus from a UTF-8 text file.

        Raises:
            ValidationError: If the file does not exist
            ArtifactError: If the file cannot be opened
            CorpusDecodeError: If a line is not valid UTF-8
        """
        try:
            with open(path, "rb") as handle:
                return CorpusFactory.load_corpus(handle, opts, lang_tag)
        except FileNotFoundError as e:
            raise ValidationError(f"Corpus file not found: {path}") from e
        except OSError as e:
            raise ArtifactError(f"Failed to read corpus {path}: {e}") from e

    @staticmethod
    def build_vocab(corpus: Corpus) -> Vocab:
        """
        Collect the distinct tokens of a corpus in first-occurrence order.

        Args:
            corpus: Tokenized corpus

        Returns:
            Vocabulary with dense ids
        """
        words = dict.fromkeys(token for sentence in corpus.sentences for token in sentence)
        return Vocab(words=tuple(words))

    @staticmethod
    def extract_bigrams(corpus: Corpus, vocab: Vocab) -> BigramTable:
        """
        Count adjacent within-sentence token pairs.

        Sentences of length one contribute nothing and no boundary symbols
        are added.

        Args:
            corpus: Tokenized corpus
            vocab: Vocabulary covering every corpus token

        Returns:
            Unique-bigram count table

        Raises:
            ConsistencyError: If a token is missing from the vocabulary
        """
        counts: dict[tuple[int, int], int] = {}
        for sentence in corpus.sentences:
            try:
                ids = [vocab.id_of(token) for token in sentence]
            except KeyError as e:
                raise ConsistencyError(f"Token {e.args[0]!r} is missing from the vocabulary") from e
            for key in zip(ids, ids[1:], strict=False):
                counts[key] = counts.get(key, 0) + 1
        return BigramTable(entries=counts, total_tokens=sum(counts.values()))
