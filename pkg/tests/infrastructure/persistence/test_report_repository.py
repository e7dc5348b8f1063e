"""
Tests for run artifacts: lexicon, metrics, traces, comparisons and gold files.
"""

import json

import pytest

from src.domain.exceptions import ArtifactError
from src.domain.models import GoldLexicon, IterationRecord, Lexicon, TrainRecord
from src.infrastructure.persistence.report_repository import (
    COMPARISON_FILE,
    LEXICON_FILE,
    TIMING_FILE,
    ComparisonRow,
    ReportRepository,
    RunMetrics,
)
from tests.fixtures.test_data import make_corpus


@pytest.fixture
def reports(run_directory) -> ReportRepository:
    return ReportRepository(run_directory)


def _record() -> TrainRecord:
    iterations = [
        IterationRecord(iteration=i, seconds=0.5 * i, grad_norm=1.0 / i, accept_rate=0.25, n_weights=10 + i)
        for i in (1, 2)
    ]
    return TrainRecord(method="cd", iterations=iterations)


def _metrics(**overrides) -> RunMetrics:
    values = {
        "method": "ll-cd",
        "iterations": 2,
        "samples": 50,
        "accuracy": 87.5,
        "seconds_total": 1.5,
        "seconds_per_iter": 0.75,
    }
    return RunMetrics(**{**values, **overrides})


class TestLexiconAndMetrics:
    """Test suite for lexicon.tsv and metrics.json"""

    def test_should_write_lexicon_in_mapping_order(self, reports):
        """One f <TAB> e line per source word."""
        path = reports.save_lexicon(Lexicon(mapping={"zz": "b", "aa": "c"}))

        assert path.name == LEXICON_FILE
        assert path.read_text(encoding="utf-8") == "zz\tb\naa\tc\n"

    def test_should_round_trip_metrics(self, reports):
        """Saved metrics reload unchanged."""
        reports.save_metrics(_metrics(bleu=12.5))

        assert reports.load_metrics() == _metrics(bleu=12.5)

    def test_should_omit_bleu_when_absent(self, reports):
        """Test that metrics.json has no bleu key without decoding."""
        # Arrange & Act
        path = reports.save_metrics(_metrics(samples=None))

        # Assert
        data = json.loads(path.read_text())
        assert "bleu" not in data
        assert data["samples"] is None
        assert set(data) == {"method", "iterations", "samples", "accuracy", "seconds_total", "seconds_per_iter"}

    def test_should_reject_malformed_metrics(self, reports, run_directory):
        """Metrics missing required fields fail to load."""
        (run_directory / "metrics.json").write_text('{"method": "em"}\n')

        with pytest.raises(ArtifactError):
            reports.load_metrics()


class TestTraces:
    """Test suite for trace.jsonl and timing.jsonl"""

    def test_should_keep_wall_clock_out_of_trace(self, reports, run_directory):
        """Test that the trace is deterministic and timing carries seconds."""
        # Arrange
        record = _record()

        # Act
        trace_path = reports.save_trace(record)

        # Assert
        trace = [json.loads(line) for line in trace_path.read_text().splitlines()]
        timing = [json.loads(line) for line in (run_directory / TIMING_FILE).read_text().splitlines()]
        assert [entry["iter"] for entry in trace] == [1, 2]
        assert all("seconds" not in entry for entry in trace)
        assert [entry["seconds"] for entry in timing] == [0.5, 1.0]

    def test_should_write_compact_json_lines(self, reports):
        """Trace lines have no spaces after separators."""
        path = reports.save_trace(_record())

        assert ", " not in path.read_text()
        assert ": " not in path.read_text()


class TestComparisonAndCorpora:
    """Test suite for comparison.tsv, decoded output, corpora and gold lexicons"""

    def test_should_format_comparison_table(self, reports, run_directory):
        """Missing accuracy is left blank."""
        rows = [
            ComparisonRow(method="em", seconds_per_iter=0.012345, accuracy=None),
            ComparisonRow(method="ll-cd", seconds_per_iter=1.5, accuracy=91.666),
        ]

        reports.save_comparison(rows)

        assert (run_directory / COMPARISON_FILE).read_text().splitlines() == [
            "method\tseconds_per_iter\taccuracy",
            "em\t0.0123\t",
            "ll-cd\t1.5000\t91.67",
        ]

    def test_should_write_decoded_sentences(self, reports):
        """Decoded sentences are space-joined, one per line, empty lines kept."""
        path = reports.save_decoded([["a", "b"], [], ["c"]])

        assert path.read_text() == "a b\n\nc\n"

    def test_should_round_trip_gold_lexicon(self, tmp_path):
        """A saved gold lexicon loads back equal."""
        gold = GoldLexicon(mapping={"minutos": "minute", "<unk>": "<unk>"})
        path = tmp_path / "gold" / "gold.tsv"

        ReportRepository.save_gold(path, gold)

        assert ReportRepository.load_gold(path) == gold

    def test_should_write_corpus_lines(self, tmp_path):
        """Corpora are written as space-separated sentences."""
        path = tmp_path / "corpus.txt"

        ReportRepository.save_corpus(path, make_corpus(["a b c", "d"]))

        assert path.read_text() == "a b c\nd\n"

    @pytest.mark.parametrize("content", ["a\tb\na\tc\n", "a b\n", "a\tb\tc\n"])
    def test_should_reject_malformed_gold(self, tmp_path, content):
        """Duplicate source words and wrong field counts are artifact errors."""
        path = tmp_path / "gold.tsv"
        path.write_text(content, encoding="utf-8")

        with pytest.raises(ArtifactError):
            ReportRepository.load_gold(path)

    def test_should_skip_blank_gold_lines(self, tmp_path):
        """Blank lines in a gold file are ignored."""
        path = tmp_path / "gold.tsv"
        path.write_text("a\tx\n\n  \nb\ty\n", encoding="utf-8")

        assert ReportRepository.load_gold(path).mapping == {"a": "x", "b": "y"}
