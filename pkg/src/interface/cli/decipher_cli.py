"""
DecipherCLI command-line interface.

This module provides the argparse front end with the subcommands ingest,
synth, train, evaluate, decode and compare. JSON results go to stdout;
progress, tables and notices go to stderr.
"""

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any, TextIO

from rich.console import Console

from src.application.factories.corpus_factory import CorpusFactory, TokenizationOptions
from src.application.services.cipher_service import synthesize
from src.application.services.pipeline_service import DecipherPipeline, compare_methods
from src.config.logging_config import configure_logging
from src.config.repository_factory import LM_FILE, create_model_repository
from src.config.settings import RunConfig
from src.domain.models import CipherSpec, IterationRecord
from src.infrastructure.persistence.lm_repository import LanguageModelRepository
from src.infrastructure.persistence.report_repository import ReportRepository
from src.interface.cli.console_helpers import ConsoleColors, format_comparison_table, format_run_summary

METHODS = ("em", "ll-gibbs", "ll-imh", "ll-cd")


def _add_run_arguments(parser: argparse.ArgumentParser, with_training: bool = True) -> None:
    """Options shared by the commands that operate on a RunConfig."""
    parser.add_argument("--config", type=Path, help="JSON run configuration")
    parser.add_argument("--source", dest="source_path", type=Path, help="Source (enciphered) corpus")
    parser.add_argument("--target", dest="target_path", type=Path, help="Target-language corpus")
    parser.add_argument("--gold", dest="gold_path", type=Path, help="Gold lexicon TSV")
    parser.add_argument("--out-dir", dest="output_dir", type=Path, help="Run directory")
    parser.add_argument("--method", choices=METHODS)
    parser.add_argument("--smoothing-k", dest="smoothing_k", type=float)
    parser.add_argument("--no-ortho", dest="ortho_enabled", action="store_false", default=None)
    parser.add_argument("--threshold", dest="ortho_threshold", type=float)
    parser.add_argument("--keep-punct", dest="strip_punct", action="store_false", default=None)
    parser.add_argument("--threads", type=int)
    if with_training:
        parser.add_argument("--iters", dest="iterations", type=int)
        parser.add_argument("--samples", dest="n_samples", type=int)
        parser.add_argument("--lr", dest="learning_rate", type=float)
        parser.add_argument("--pb", dest="p_backoff", type=float)
        parser.add_argument("--refresh", dest="qs_refresh_period", type=int)
        parser.add_argument("--seed", dest="rng_seed", type=int)


_RUN_FIELDS = (
    "source_path",
    "target_path",
    "gold_path",
    "output_dir",
    "method",
    "smoothing_k",
    "ortho_enabled",
    "ortho_threshold",
    "strip_punct",
    "threads",
    "decode_input",
    "decode_reference",
)
_SAMPLER_FIELDS = ("iterations", "n_samples", "learning_rate", "p_backoff", "qs_refresh_period", "rng_seed")


class DecipherCLI:
    """
    Command-line interface for the decipherment toolkit.

    Each subcommand maps to one handler; handlers raise domain errors and
    leave exit-code mapping to the entry point.
    """

    def __init__(self, stdout: TextIO | None = None, console: Console | None = None) -> None:
        """
        Initialize the CLI.

        Args:
            stdout: Stream for machine-readable output (default sys.stdout)
            console: Rich console for human-readable output (default stderr)
        """
        self.stdout = stdout or sys.stdout
        self.console = console or Console(stderr=True)
        self.parser = self._build_parser()

    def _build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(prog="decipher", description="Log-linear decipherment toolkit")
        verbosity = parser.add_mutually_exclusive_group()
        verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
        verbosity.add_argument("-q", "--quiet", action="store_true", help="Warnings and errors only")
        commands = parser.add_subparsers(dest="command", required=True)

        ingest = commands.add_parser("ingest", help="Summarize a corpus as JSON")
        ingest.add_argument("--input", type=Path, required=True)
        ingest.add_argument("--lang", default="und")
        ingest.add_argument("--keep-punct", action="store_true")
        ingest.add_argument("--pair", type=Path, help="Other side of the pair, for the joint vocabulary size")
        ingest.set_defaults(handler=self.ingest)

        synth = commands.add_parser("synth", help="Generate a synthetic cipher instance")
        synth.add_argument("--input", type=Path, required=True)
        synth.add_argument("--mode", choices=("cognate", "opaque"), default="cognate")
        synth.add_argument("--seed", type=int, default=0)
        synth.add_argument("--out-dir", type=Path, required=True)
        synth.add_argument("--vocab-limit", type=int)
        synth.add_argument("--ratio", type=float, default=0.5, help="Share of sentences enciphered as the source")
        synth.add_argument("--keep-punct", action="store_true")
        synth.set_defaults(handler=self.synth)

        train = commands.add_parser("train", help="Train a model and write run artifacts")
        _add_run_arguments(train)
        train.add_argument("--decode-input", dest="decode_input", type=Path)
        train.add_argument("--decode-reference", dest="decode_reference", type=Path)
        train.add_argument("--dump-lm", action="store_true", help="Also write lm.tsv")
        train.set_defaults(handler=self.train)

        evaluate = commands.add_parser("evaluate", help="Score a trained model against a gold lexicon")
        _add_run_arguments(evaluate, with_training=False)
        evaluate.set_defaults(handler=self.evaluate)

        decode = commands.add_parser("decode", help="Viterbi-decode source sentences with a trained model")
        _add_run_arguments(decode, with_training=False)
        decode.add_argument("--input", dest="decode_input", type=Path)
        decode.add_argument("--reference", dest="decode_reference", type=Path)
        decode.set_defaults(handler=self.decode)

        compare = commands.add_parser("compare", help="Compare methods by time per iteration and accuracy")
        _add_run_arguments(compare)
        compare.add_argument("--methods", nargs="+", choices=METHODS, default=list(METHODS))
        compare.add_argument("--ablate-ortho", action="store_true", help="Add an ll-cd run without ortho features")
        compare.set_defaults(handler=self.compare)
        return parser

    def run(self, argv: Sequence[str] | None = None) -> None:
        """
        Parse arguments and run one subcommand.

        Args:
            argv: Arguments without the program name (default sys.argv[1:])
        """
        args = self.parser.parse_args(argv)
        level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
        configure_logging(level)
        args.handler(args)

    def _emit(self, payload: dict[str, Any]) -> None:
        self.stdout.write(json.dumps(payload) + "\n")
        self.stdout.flush()

    def _config(self, args: argparse.Namespace) -> RunConfig:
        values = vars(args)
        overrides: dict[str, Any] = {name: values.get(name) for name in _RUN_FIELDS}
        overrides["sampler"] = {name: values.get(name) for name in _SAMPLER_FIELDS}
        return RunConfig.load(values.get("config"), overrides)

    @staticmethod
    def _pipeline(cfg: RunConfig) -> DecipherPipeline:
        return DecipherPipeline(
            cfg,
            create_model_repository(cfg),
            ReportRepository(cfg.output_dir),
            LanguageModelRepository(cfg.output_dir / LM_FILE),
        )

    def _stream_iteration(self, record: IterationRecord) -> None:
        self._emit(record.stream_entry())

    def ingest(self, args: argparse.Namespace) -> None:
        """Print {lang, sentences, tokens, vocab_size, unique_bigrams, bigram_tokens[, max_vocab]}."""
        opts = TokenizationOptions(strip_punct=not args.keep_punct)
        corpus = CorpusFactory.load_corpus_file(args.input, opts, args.lang)
        vocab = CorpusFactory.build_vocab(corpus)
        bigrams = CorpusFactory.extract_bigrams(corpus, vocab)
        summary: dict[str, Any] = {
            "lang": corpus.lang_tag,
            "sentences": corpus.num_sentences,
            "tokens": corpus.num_tokens,
            "vocab_size": len(vocab),
            "unique_bigrams": bigrams.unique_count,
            "bigram_tokens": bigrams.total_tokens,
        }
        if args.pair is not None:
            other = CorpusFactory.build_vocab(CorpusFactory.load_corpus_file(args.pair, opts))
            summary["max_vocab"] = max(len(vocab), len(other))
        self._emit(summary)

    def synth(self, args: argparse.Namespace) -> None:
        """Write source.txt, target.txt, plaintext.txt and gold.tsv."""
        opts = TokenizationOptions(strip_punct=not args.keep_punct)
        corpus = CorpusFactory.load_corpus_file(args.input, opts)
        spec = CipherSpec(mode=args.mode, rng_seed=args.seed, vocab_limit=args.vocab_limit)
        instance = synthesize(corpus, spec, args.ratio)
        out: Path = args.out_dir
        ReportRepository.save_corpus(out / "source.txt", instance.source)
        ReportRepository.save_corpus(out / "target.txt", instance.target)
        ReportRepository.save_corpus(out / "plaintext.txt", instance.plaintext)
        ReportRepository.save_gold(out / "gold.tsv", instance.gold)
        self._emit(
            {
                "mode": spec.mode,
                "seed": spec.rng_seed,
                "source_sentences": instance.source.num_sentences,
                "target_sentences": instance.target.num_sentences,
                "gold_size": len(instance.gold),
                "out_dir": str(out),
            }
        )

    def train(self, args: argparse.Namespace) -> None:
        """Train, streaming one JSON line per iteration, then print a summary panel."""
        cfg = self._config(args)
        result = self._pipeline(cfg).run(on_iteration=self._stream_iteration, dump_lm=args.dump_lm)
        self.console.print(format_run_summary(result.metrics, str(cfg.output_dir)))

    def evaluate(self, args: argparse.Namespace) -> None:
        cfg = self._config(args)
        report = self._pipeline(cfg).evaluate()
        self._emit(report.model_dump())

    def decode(self, args: argparse.Namespace) -> None:
        cfg = self._config(args)
        result = self._pipeline(cfg).decode()
        self._emit({"sentences": len(result.hypotheses), "bleu": result.bleu, "output": str(result.output_path)})

    def compare(self, args: argparse.Namespace) -> None:
        """Run each method into its own subdirectory and tabulate the results."""
        base = self._config(args)
        configs = [base.with_overrides(method=m, output_dir=base.output_dir / m) for m in args.methods]
        labels = list(args.methods)
        if args.ablate_ortho:
            configs.append(
                base.with_overrides(method="ll-cd", ortho_enabled=False, output_dir=base.output_dir / "ll-cd-no-ortho")
            )
            labels.append("ll-cd-no-ortho")
        rows = compare_methods(configs, self._pipeline, base.output_dir, labels)
        self.console.print(format_comparison_table(rows))
        self.console.print(
            f"[{ConsoleColors.INFO}]Wrote {base.output_dir / 'comparison.tsv'}[/{ConsoleColors.INFO}]"
        )
