"""
Run artifacts: lexicons, metrics, traces, comparisons and corpora.

All files live under one run directory and are written with
deterministic ordering so reruns with the same seed reproduce them.
"""

import json
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any

from pydantic import BaseModel
from pydantic import ValidationError as PydanticValidationError

from src.application.factories.validation import convert_pydantic_error
from src.domain.exceptions import ArtifactError
from src.domain.models import Corpus, GoldLexicon, Lexicon, TrainRecord
from src.infrastructure.persistence.file_utils import read_lines, split_fields, write_lines

LEXICON_FILE = "lexicon.tsv"
METRICS_FILE = "metrics.json"
TRACE_FILE = "trace.jsonl"
TIMING_FILE = "timing.jsonl"
COMPARISON_FILE = "comparison.tsv"
DECODED_FILE = "decoded.txt"


class RunMetrics(BaseModel):
    """Contents of metrics.json."""

    method: str
    iterations: int
    samples: int | None
    accuracy: float | None
    bleu: float | None = None
    seconds_total: float
    seconds_per_iter: float

    def to_json(self) -> str:
        data = self.model_dump()
        if data["bleu"] is None:
            del data["bleu"]
        return json.dumps(data, indent=2)


class ComparisonRow(BaseModel):
    """One method's line of the comparison table."""

    method: str
    seconds_per_iter: float
    accuracy: float | None


def _dumps(entry: dict[str, Any]) -> str:
    return json.dumps(entry, separators=(",", ":"))


class ReportRepository:
    """Reader and writer of the artifacts in a run directory."""

    def __init__(self, out_dir: Path) -> None:
        self.out_dir = Path(out_dir)

    def path(self, name: str) -> Path:
        return self.out_dir / name

    def save_lexicon(self, lex: Lexicon) -> Path:
        path = self.path(LEXICON_FILE)
        write_lines(path, (f"{f}\t{e}" for f, e in lex.mapping.items()))
        return path

    def save_metrics(self, metrics: RunMetrics) -> Path:
        path = self.path(METRICS_FILE)
        write_lines(path, [metrics.to_json()])
        return path

    def load_metrics(self) -> RunMetrics:
        text = "\n".join(read_lines(self.path(METRICS_FILE)))
        try:
            return RunMetrics.model_validate_json(text)
        except PydanticValidationError as e:
            raise ArtifactError(f"{self.path(METRICS_FILE)}: {convert_pydantic_error(e)}") from e

    def save_trace(self, record: TrainRecord) -> Path:
        """Write trace.jsonl (deterministic fields) and timing.jsonl (with wall-clock seconds)."""
        path = self.path(TRACE_FILE)
        write_lines(path, (_dumps(entry.trace_entry()) for entry in record.iterations))
        write_lines(self.path(TIMING_FILE), (_dumps(entry.stream_entry()) for entry in record.iterations))
        return path

    def save_comparison(self, rows: Sequence[ComparisonRow]) -> Path:
        path = self.path(COMPARISON_FILE)

        def fmt(row: ComparisonRow) -> str:
            acc = "" if row.accuracy is None else f"{row.accuracy:.2f}"
            return f"{row.method}\t{row.seconds_per_iter:.4f}\t{acc}"

        write_lines(path, ["method\tseconds_per_iter\taccuracy", *(fmt(row) for row in rows)])
        return path

    def save_decoded(self, sentences: Iterable[Sequence[str]]) -> Path:
        path = self.path(DECODED_FILE)
        write_lines(path, (" ".join(s) for s in sentences))
        return path

    @staticmethod
    def save_corpus(path: Path, corpus: Corpus) -> None:
        write_lines(path, (" ".join(s) for s in corpus.sentences))

    @staticmethod
    def save_gold(path: Path, gold: GoldLexicon) -> None:
        write_lines(path, (f"{f}\t{e}" for f, e in gold.mapping.items()))

    @staticmethod
    def load_gold(path: Path) -> GoldLexicon:
        """
        Read a `f <TAB> e` gold lexicon.

        Raises:
            ArtifactError: If the file is missing or malformed, or maps a word twice
        """
        mapping: dict[str, str] = {}
        for line_number, line in enumerate(read_lines(path), start=1):
            if not line.strip():
                continue
            f, e = split_fields(line, 2, path, line_number)
            if f in mapping:
                raise ArtifactError(f"{path}:{line_number}: '{f}' appears twice")
            mapping[f] = e
        return GoldLexicon(mapping=mapping)
