"""
TSV repository for log-linear weight vectors.

Format: an optional header line `# ortho_weight <TAB> value` (written only
when the orthographic feature is enabled), then one `f <TAB> e <TAB> weight`
line per stored translation weight in (f, e) id order.
"""

import numpy as np

from src.domain.exceptions import ArtifactError, ValidationError
from src.domain.features import FeatureSpace, WeightVector
from src.domain.language_model import BigramLM
from src.domain.loglinear import DecipherModel, LogLinearModel
from src.infrastructure.persistence.file_utils import parse_float, read_lines, split_fields, write_lines
from src.infrastructure.persistence.repository import ModelRepository

ORTHO_HEADER = "# ortho_weight"


class WeightRepository(ModelRepository):
    """Weight dump for models trained with a log-linear method."""

    def _serialize(self, m: LogLinearModel) -> list[str]:
        lines = []
        if m.space.ortho_enabled:
            lines.append(f"{ORTHO_HEADER}\t{m.weights.ortho_weight!r}")
        vf, ve = m.vf.words, m.ve.words
        for (f, e), weight in m.weights.translation_weights.items():
            lines.append(f"{vf[f]}\t{ve[e]}\t{weight!r}")
        return lines

    def save(self, model: DecipherModel) -> None:
        if not isinstance(model, LogLinearModel):
            raise ValidationError("WeightRepository stores log-linear models only")
        write_lines(self.file_path, self._serialize(model))

    def load(self, lm: BigramLM, space: FeatureSpace) -> LogLinearModel:
        weights = WeightVector.zeros(space.shape, space.threshold)
        ortho_weight = 0.0
        for line_number, line in enumerate(read_lines(self.file_path), start=1):
            if not line:
                continue
            if line.startswith(ORTHO_HEADER):
                _, value = split_fields(line, 2, self.file_path, line_number)
                ortho_weight = parse_float(value, self.file_path, line_number)
                continue
            f, e, value = split_fields(line, 3, self.file_path, line_number)
            if f not in space.vf or e not in space.ve:
                raise ArtifactError(f"{self.file_path}:{line_number}: pair ({f}, {e}) is outside the vocabularies")
            weights.set(space.vf.id_of(f), space.ve.id_of(e), parse_float(value, self.file_path, line_number))
        if not np.isfinite(ortho_weight):
            raise ArtifactError(f"{self.file_path}: ortho weight is not finite")
        weights.ortho_weight = ortho_weight if space.ortho_enabled else 0.0
        return LogLinearModel(weights=weights, lm=lm, space=space)
