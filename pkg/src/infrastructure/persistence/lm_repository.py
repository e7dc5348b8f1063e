"""
TSV repository for the target bigram language model.

Format: a `# smoothing_k <TAB> k` header, then one `e1 <TAB> e2 <TAB> prob`
line per ordered pair in id order.
"""

from pathlib import Path

import numpy as np
from pydantic import ValidationError as PydanticValidationError

from src.application.factories.validation import convert_pydantic_error
from src.domain.exceptions import ArtifactError
from src.domain.language_model import BigramLM
from src.domain.models import Vocab
from src.infrastructure.persistence.file_utils import parse_float, read_lines, split_fields, write_lines

SMOOTHING_HEADER = "# smoothing_k"


class LanguageModelRepository:
    """Dump and reload of a BigramLM over a known vocabulary."""

    def __init__(self, file_path: Path) -> None:
        self.file_path = Path(file_path)

    def save(self, lm: BigramLM) -> None:
        words = lm.vocab.words

        def lines() -> list[str]:
            out = [f"{SMOOTHING_HEADER}\t{lm.smoothing_k!r}"]
            for e1, row in enumerate(lm.joint):
                out.extend(f"{words[e1]}\t{words[e2]}\t{float(p)!r}" for e2, p in enumerate(row))
            return out

        write_lines(self.file_path, lines())

    def load(self, vocab: Vocab) -> BigramLM:
        """
        Rebuild the LM over vocab.

        Raises:
            ArtifactError: If the dump is malformed, names unknown words or is not normalized
        """
        joint = np.zeros((len(vocab), len(vocab)), dtype=np.float64)
        smoothing_k = 0.0
        for line_number, line in enumerate(read_lines(self.file_path), start=1):
            if not line:
                continue
            if line.startswith(SMOOTHING_HEADER):
                _, value = split_fields(line, 2, self.file_path, line_number)
                smoothing_k = parse_float(value, self.file_path, line_number)
                continue
            e1, e2, value = split_fields(line, 3, self.file_path, line_number)
            if e1 not in vocab or e2 not in vocab:
                raise ArtifactError(f"{self.file_path}:{line_number}: pair ({e1}, {e2}) is outside the vocabulary")
            joint[vocab.id_of(e1), vocab.id_of(e2)] = parse_float(value, self.file_path, line_number)
        try:
            return BigramLM(vocab=vocab, joint=joint, smoothing_k=smoothing_k)
        except PydanticValidationError as e:
            raise ArtifactError(f"{self.file_path}: {convert_pydantic_error(e)}") from e

    def exists(self) -> bool:
        return self.file_path.is_file()
