"""
TSV repository for EM translation tables.

One `e <TAB> f <TAB> p(f|e)` line per cell with probability at least
1e-6, ordered by target then source id. Dropped cells make rows sum to
slightly less than one, so rows are renormalized on load.
"""

import numpy as np
from pydantic import ValidationError as PydanticValidationError

from src.application.factories.validation import convert_pydantic_error
from src.domain.exceptions import ArtifactError, ValidationError
from src.domain.features import FeatureSpace
from src.domain.language_model import BigramLM
from src.domain.loglinear import DecipherModel, EMModel
from src.domain.models import TranslationTable
from src.infrastructure.persistence.file_utils import parse_float, read_lines, split_fields, write_lines
from src.infrastructure.persistence.repository import ModelRepository

MIN_DUMP_PROB = 1e-6


class TableRepository(ModelRepository):
    """Table dump for models trained with EM."""

    def save(self, model: DecipherModel) -> None:
        if not isinstance(model, EMModel):
            raise ValidationError("TableRepository stores EM models only")
        probs = model.table.probs
        e_ids, f_ids = np.nonzero(probs >= MIN_DUMP_PROB)
        ve, vf = model.ve.words, model.vf.words
        write_lines(
            self.file_path,
            (f"{ve[e]}\t{vf[f]}\t{float(probs[e, f])!r}" for e, f in zip(e_ids, f_ids, strict=True)),
        )

    def load(self, lm: BigramLM, space: FeatureSpace) -> EMModel:
        probs = np.zeros((len(space.ve), len(space.vf)), dtype=np.float64)
        for line_number, line in enumerate(read_lines(self.file_path), start=1):
            if not line:
                continue
            e, f, value = split_fields(line, 3, self.file_path, line_number)
            if f not in space.vf or e not in space.ve:
                raise ArtifactError(f"{self.file_path}:{line_number}: pair ({e}, {f}) is outside the vocabularies")
            probs[space.ve.id_of(e), space.vf.id_of(f)] = parse_float(value, self.file_path, line_number)
        sums = probs.sum(axis=1, keepdims=True)
        # rows lost entirely fall back to uniform
        probs = np.where(sums > 0, probs / np.where(sums > 0, sums, 1.0), 1.0 / len(space.vf))
        try:
            table = TranslationTable(probs=probs)
        except PydanticValidationError as e:
            raise ArtifactError(f"{self.file_path}: {convert_pydantic_error(e)}") from e
        return EMModel(table=table, lm=lm, vf=space.vf, ve=space.ve)
