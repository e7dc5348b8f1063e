"""
Tests for the DecipherCLI subcommands.

Commands run for real against a small synthetic instance; stdout carries
JSON, stderr carries Rich output.
"""

import json

import pytest
from pydantic import ValidationError as PydanticValidationError

from src.domain.exceptions import ValidationError
from tests.fixtures.test_data import write_lines
from tests.interface.cli.conftest import stdout_json

QUICK = ["--iters", "2", "--samples", "3", "--seed", "1"]


def _run_args(files, out_dir, *extra: str) -> list[str]:
    return [
        "--source",
        str(files.source),
        "--target",
        str(files.target),
        "--gold",
        str(files.gold),
        "--out-dir",
        str(out_dir),
        *extra,
    ]


class TestArgumentParsing:
    """Test suite for the argument parser."""

    def test_should_require_subcommand(self, decipher_cli):
        """No subcommand is a usage error."""
        with pytest.raises(SystemExit) as exc_info:
            decipher_cli.run([])
        assert exc_info.value.code == 2

    def test_should_reject_verbose_with_quiet(self, decipher_cli, cipher_files):
        """-v and -q are mutually exclusive."""
        with pytest.raises(SystemExit) as exc_info:
            decipher_cli.run(["-v", "-q", "ingest", "--input", str(cipher_files.target)])
        assert exc_info.value.code == 2

    def test_should_reject_unknown_method(self, decipher_cli):
        """--method only accepts the four trainers."""
        with pytest.raises(SystemExit):
            decipher_cli.run(["train", "--method", "sgd"])

    def test_should_fail_validation_without_corpora(self, decipher_cli, monkeypatch, tmp_path):
        """Train without source or target paths fails config validation."""
        monkeypatch.chdir(tmp_path)

        with pytest.raises(PydanticValidationError):
            decipher_cli.run(["train"])


class TestIngestAndSynth:
    """Test suite for the ingest and synth commands."""

    def test_should_summarize_corpus(self, decipher_cli, cli_output, tmp_path):
        """Test the ingest JSON summary."""
        # Arrange
        corpus = tmp_path / "c.txt"
        write_lines(corpus, ["The cat sat.", "", "the dog sat"])

        # Act
        decipher_cli.run(["ingest", "--input", str(corpus), "--lang", "en"])

        # Assert
        [summary] = stdout_json(cli_output)
        assert summary == {
            "lang": "en",
            "sentences": 2,
            "tokens": 6,
            "vocab_size": 4,
            "unique_bigrams": 4,
            "bigram_tokens": 4,
        }

    def test_should_report_joint_vocabulary_size(self, decipher_cli, cli_output, tmp_path):
        """--pair adds the larger of the two vocabulary sizes."""
        first, second = tmp_path / "a.txt", tmp_path / "b.txt"
        write_lines(first, ["a b"])
        write_lines(second, ["x y z"])

        decipher_cli.run(["ingest", "--input", str(first), "--pair", str(second)])

        assert stdout_json(cli_output)[0]["max_vocab"] == 3

    def test_should_write_synthetic_instance(self, decipher_cli, cli_output, cipher_files, tmp_path):
        """synth writes both corpora, the plaintext and the gold lexicon."""
        out = tmp_path / "synth"

        decipher_cli.run(["synth", "--input", str(cipher_files.plaintext), "--out-dir", str(out), "--seed", "4"])

        [summary] = stdout_json(cli_output)
        assert summary["mode"] == "cognate"
        assert summary["seed"] == 4
        for name in ("source.txt", "target.txt", "plaintext.txt", "gold.tsv"):
            assert (out / name).is_file()
        assert len((out / "gold.tsv").read_text().splitlines()) == summary["gold_size"]

    def test_should_reject_one_sentence_corpus(self, decipher_cli, tmp_path):
        """A corpus that cannot be split is invalid input."""
        corpus = tmp_path / "one.txt"
        write_lines(corpus, ["only one line"])

        with pytest.raises(ValidationError):
            decipher_cli.run(["synth", "--input", str(corpus), "--out-dir", str(tmp_path / "o")])


class TestTrainEvaluateDecode:
    """Test suite for train, evaluate and decode."""

    def test_should_stream_iterations_and_print_summary(self, decipher_cli, cli_output, cipher_files, tmp_path):
        """Test one JSON line per iteration on stdout and a panel on stderr."""
        # Arrange
        out = tmp_path / "run"

        # Act
        decipher_cli.run(["train", *_run_args(cipher_files, out, "--method", "ll-imh", *QUICK)])

        # Assert
        lines = stdout_json(cli_output)
        assert [line["iter"] for line in lines] == [1, 2]
        assert all("seconds" in line for line in lines)
        assert "Run complete" in cli_output.stderr.getvalue()
        metrics = json.loads((out / "metrics.json").read_text())
        assert metrics["method"] == "ll-imh"
        assert metrics["samples"] == 3

    def test_should_evaluate_trained_run(self, decipher_cli, cli_output, cipher_files, tmp_path):
        """evaluate prints the accuracy report of the stored model."""
        out = tmp_path / "run"
        decipher_cli.run(["train", *_run_args(cipher_files, out, "--method", "ll-gibbs", *QUICK)])
        cli_output.stdout.seek(0)
        cli_output.stdout.truncate()

        decipher_cli.run(["evaluate", *_run_args(cipher_files, out, "--method", "ll-gibbs")])

        [report] = stdout_json(cli_output)
        assert set(report) == {"accuracy", "correct", "evaluated"}
        assert report["accuracy"] == pytest.approx(json.loads((out / "metrics.json").read_text())["accuracy"])

    def test_should_decode_with_reference(self, decipher_cli, cli_output, cipher_files, tmp_path):
        """decode reports the sentence count, BLEU and output path."""
        out = tmp_path / "run"
        decipher_cli.run(["train", *_run_args(cipher_files, out, "--method", "em", "--iters", "2")])
        cli_output.stdout.seek(0)
        cli_output.stdout.truncate()

        decipher_cli.run(
            [
                "decode",
                *_run_args(cipher_files, out, "--method", "em"),
                "--input",
                str(cipher_files.source),
                "--reference",
                str(cipher_files.plaintext),
            ]
        )

        [result] = stdout_json(cli_output)
        assert result["sentences"] == len(cipher_files.source.read_text().splitlines())
        assert 0.0 <= result["bleu"] <= 100.0
        assert result["output"].endswith("decoded.txt")

    def test_should_read_settings_from_config_file(self, decipher_cli, cli_output, cipher_files, tmp_path):
        """Flags override the config file field by field."""
        config = tmp_path / "cfg.json"
        config.write_text(
            json.dumps(
                {
                    "source_path": str(cipher_files.source),
                    "target_path": str(cipher_files.target),
                    "output_dir": str(tmp_path / "from-file"),
                    "method": "ll-cd",
                    "sampler": {"iterations": 3, "n_samples": 2},
                }
            )
        )

        decipher_cli.run(["train", "--config", str(config), "--iters", "1"])

        assert len(stdout_json(cli_output)) == 1
        assert (tmp_path / "from-file" / "weights.tsv").is_file()


class TestCompare:
    """Test suite for the compare command."""

    def test_should_run_each_method_in_its_own_directory(self, decipher_cli, cli_output, cipher_files, tmp_path):
        """Test subdirectories per method, comparison.tsv and the ortho ablation row."""
        # Arrange
        out = tmp_path / "cmp"

        # Act
        decipher_cli.run(
            ["compare", *_run_args(cipher_files, out, *QUICK), "--methods", "em", "ll-cd", "--ablate-ortho"]
        )

        # Assert
        assert (out / "em" / "table.tsv").is_file()
        assert (out / "ll-cd" / "weights.tsv").is_file()
        assert (out / "ll-cd-no-ortho" / "weights.tsv").is_file()
        rows = (out / "comparison.tsv").read_text().splitlines()
        assert [row.split("\t")[0] for row in rows[1:]] == ["em", "ll-cd", "ll-cd-no-ortho"]
        assert "Method comparison" in cli_output.stderr.getvalue()
