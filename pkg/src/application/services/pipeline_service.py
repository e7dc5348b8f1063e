"""
DecipherPipeline application service for end-to-end runs.

This module wires ingestion, the language model, initialization,
training, lexicon extraction, scoring and decoding into the use cases the
CLI exposes, persisting artifacts through injected repositories.
"""

import logging
from collections.abc import Callable, Sequence
from pathlib import Path

from pydantic import BaseModel, ConfigDict

from src.application.factories.corpus_factory import CorpusFactory, TokenizationOptions
from src.application.factories.weight_factory import WeightFactory
from src.application.services.em_service import run_em
from src.application.services.evaluation_service import (
    AccuracyReport,
    bleu,
    decode_sentences,
    extract_lexicon,
    score_lexicon,
)
from src.application.services.language_model_service import train_bigram_lm
from src.application.services.training_service import TrainMethod, train
from src.config.settings import RunConfig
from src.domain.exceptions import ArtifactError, ValidationError
from src.domain.features import FeatureSpace
from src.domain.language_model import BigramLM
from src.domain.loglinear import DecipherModel, EMModel, LogLinearModel
from src.domain.models import BigramTable, Corpus, IterationRecord, Lexicon, TrainRecord, Vocab
from src.infrastructure.persistence.lm_repository import LanguageModelRepository
from src.infrastructure.persistence.report_repository import ComparisonRow, ReportRepository, RunMetrics
from src.infrastructure.persistence.repository import ModelRepository

logger = logging.getLogger(__name__)

TRAINER_METHODS: dict[str, TrainMethod] = {"ll-gibbs": "gibbs", "ll-imh": "imh_gibbs", "ll-cd": "cd"}

IterationCallback = Callable[[IterationRecord], None]


class PreparedData(BaseModel):
    """Corpora, vocabularies, source bigrams and the target LM of a run."""

    model_config = ConfigDict(frozen=True)

    source: Corpus
    target: Corpus
    vf: Vocab
    ve: Vocab
    src_bigrams: BigramTable
    lm: BigramLM


class DecodeResult(BaseModel):
    """Decoded sentences, their BLEU against the reference when one was given, and the output file."""

    model_config = ConfigDict(frozen=True)

    hypotheses: list[list[str]]
    bleu: float | None
    output_path: Path


class RunResult(BaseModel):
    """Outcome of a full training run."""

    model_config = ConfigDict(frozen=True)

    model: DecipherModel
    record: TrainRecord
    lexicon: Lexicon
    metrics: RunMetrics
    accuracy: AccuracyReport | None
    decoded: DecodeResult | None


class DecipherPipeline:
    """
    Application service for orchestrating decipherment runs.

    The pipeline is bound to one RunConfig; the model and report
    repositories decide where and how artifacts are stored.
    """

    def __init__(
        self,
        cfg: RunConfig,
        model_repository: ModelRepository,
        reports: ReportRepository,
        lm_repository: LanguageModelRepository | None = None,
    ) -> None:
        """
        Initialize the pipeline with its configuration and repositories.

        Args:
            cfg: Validated run configuration
            model_repository: Store for the trained model
            reports: Store for lexicon, metrics and traces
            lm_repository: Optional store for the target LM
        """
        self.cfg = cfg
        self.model_repository = model_repository
        self.reports = reports
        self.lm_repository = lm_repository

    @property
    def _tokenization(self) -> TokenizationOptions:
        return TokenizationOptions(strip_punct=self.cfg.strip_punct)

    def prepare(self) -> PreparedData:
        """
        Ingest both corpora and train the target LM.

        Raises:
            ArtifactError: If a corpus cannot be read
            CorpusDecodeError: If a corpus is not valid UTF-8
            ValidationError: If a corpus is empty or the LM parameters are invalid
        """
        source = CorpusFactory.load_corpus_file(self.cfg.source_path, self._tokenization, "source")
        target = CorpusFactory.load_corpus_file(self.cfg.target_path, self._tokenization, "target")
        if source.num_tokens == 0 or target.num_tokens == 0:
            raise ValidationError("Source and target corpora must both contain tokens")
        vf, ve = CorpusFactory.build_vocab(source), CorpusFactory.build_vocab(target)
        src_bigrams = CorpusFactory.extract_bigrams(source, vf)
        lm = train_bigram_lm(CorpusFactory.extract_bigrams(target, ve), ve, self.cfg.smoothing_k)
        logger.info(
            "Ingested %d source / %d target sentences; |V_F|=%d |V_E|=%d, %d source bigram tokens",
            source.num_sentences,
            target.num_sentences,
            len(vf),
            len(ve),
            src_bigrams.total_tokens,
        )
        return PreparedData(source=source, target=target, vf=vf, ve=ve, src_bigrams=src_bigrams, lm=lm)

    def _space(self, data: PreparedData) -> FeatureSpace:
        features = self.cfg.feature_config()
        if self.cfg.method == "em":
            features = features.model_copy(update={"ortho_enabled": False})
        return WeightFactory.build_space(data.vf, data.ve, features)

    def train(
        self, data: PreparedData, on_iteration: IterationCallback | None = None
    ) -> tuple[DecipherModel, TrainRecord]:
        """
        Train the configured method from its initial state.

        Raises:
            DivergenceError: If a log-linear trainer produces non-finite weights
            NumericalDegeneracyError: If EM meets a bigram with zero posterior mass
        """
        sampler = self.cfg.sampler
        if self.cfg.method == "em":
            table, record = run_em(
                data.src_bigrams,
                data.lm,
                data.vf,
                sampler.iterations,
                threads=self.cfg.threads,
                on_iteration=on_iteration,
            )
            return EMModel(table=table, lm=data.lm, vf=data.vf, ve=data.ve), record
        space, weights = WeightFactory.initialize(data.vf, data.ve, self.cfg.feature_config())
        model = LogLinearModel(weights=weights, lm=data.lm, space=space)
        return train(
            model,
            data.src_bigrams,
            TRAINER_METHODS[self.cfg.method],
            sampler,
            threads=self.cfg.threads,
            on_iteration=on_iteration,
        )

    def _gold_report(self, lexicon: Lexicon) -> AccuracyReport | None:
        if self.cfg.gold_path is None:
            return None
        return score_lexicon(lexicon, self.reports.load_gold(self.cfg.gold_path))

    def run(self, on_iteration: IterationCallback | None = None, dump_lm: bool = False) -> RunResult:
        """
        Train, extract the lexicon, score and decode; write every artifact.

        Writes the model dump, lexicon.tsv, trace.jsonl, timing.jsonl and
        metrics.json, plus decoded.txt when decode_input is configured and
        lm.tsv when dump_lm is set.
        """
        data = self.prepare()
        if dump_lm and self.lm_repository is not None:
            self.lm_repository.save(data.lm)
        logger.info("Training %s for %d iterations", self.cfg.method, self.cfg.iterations)
        model, record = self.train(data, on_iteration)
        self.model_repository.save(model)

        lexicon = extract_lexicon(model)
        self.reports.save_lexicon(lexicon)
        report = self._gold_report(lexicon)
        decoded = self.decode(model) if self.cfg.decode_input is not None else None

        metrics = RunMetrics(
            method=self.cfg.method,
            iterations=len(record.iterations),
            samples=None if self.cfg.method == "em" else self.cfg.sampler.n_samples,
            accuracy=report.accuracy if report else None,
            bleu=decoded.bleu if decoded else None,
            seconds_total=record.seconds_total,
            seconds_per_iter=record.seconds_per_iter,
        )
        self.reports.save_metrics(metrics)
        self.reports.save_trace(record)
        logger.info("Artifacts written to %s", self.reports.out_dir)
        return RunResult(
            model=model, record=record, lexicon=lexicon, metrics=metrics, accuracy=report, decoded=decoded
        )

    def load_model(self, data: PreparedData | None = None) -> DecipherModel:
        """
        Reload the trained model of this run directory.

        The vocabularies come from the configured corpora; the LM comes from
        lm.tsv when it was dumped and is retrained otherwise.

        Raises:
            ArtifactError: If the run directory holds no model dump
        """
        data = data or self.prepare()
        lm = data.lm
        if self.lm_repository is not None and self.lm_repository.exists():
            lm = self.lm_repository.load(data.ve)
        if not self.model_repository.exists():
            raise ArtifactError(f"No trained model at {self.model_repository.file_path}")
        return self.model_repository.load(lm, self._space(data))

    def evaluate(self) -> AccuracyReport:
        """
        Score the stored model against the gold lexicon and rewrite lexicon.tsv.

        Raises:
            ValidationError: If no gold lexicon is configured
            CoverageError: If the gold lexicon lacks an evaluated word
        """
        if self.cfg.gold_path is None:
            raise ValidationError("evaluate needs a gold lexicon (gold_path)")
        lexicon = extract_lexicon(self.load_model())
        self.reports.save_lexicon(lexicon)
        report = score_lexicon(lexicon, self.reports.load_gold(self.cfg.gold_path))
        logger.info("Accuracy %.2f%% over %d words", report.accuracy, report.evaluated)
        return report

    def decode(
        self, model: DecipherModel | None = None, input_path: Path | None = None, reference_path: Path | None = None
    ) -> DecodeResult:
        """
        Viterbi-decode a source file and optionally score it with BLEU.

        Args:
            model: Model to decode with (loaded from the run directory when omitted)
            input_path: Source sentences (defaults to cfg.decode_input)
            reference_path: Reference sentences (defaults to cfg.decode_reference)

        Raises:
            ValidationError: If no input is given or reference and input differ in length
            OOVError: If the input holds a word outside the source vocabulary
        """
        input_path = input_path or self.cfg.decode_input
        reference_path = reference_path or self.cfg.decode_reference
        if input_path is None:
            raise ValidationError("decode needs an input file")
        model = model or self.load_model()
        sentences = CorpusFactory.load_corpus_file(input_path, self._tokenization, "source").sentences
        hypotheses = decode_sentences(sentences, model, threads=self.cfg.threads)
        output_path = self.reports.save_decoded(hypotheses)
        score = None
        if reference_path is not None:
            references = CorpusFactory.load_corpus_file(reference_path, self._tokenization, "target").sentences
            score = bleu(hypotheses, references)
            logger.info("BLEU %.2f over %d sentences", score, len(hypotheses))
        return DecodeResult(hypotheses=hypotheses, bleu=score, output_path=output_path)


def compare_methods(
    cfgs: Sequence[RunConfig],
    pipeline_factory: Callable[[RunConfig], DecipherPipeline],
    out_dir: Path,
    labels: Sequence[str] | None = None,
) -> list[ComparisonRow]:
    """
    Run several configurations and tabulate time per iteration and accuracy.

    Args:
        cfgs: At least two run configurations
        pipeline_factory: Builds the pipeline of one configuration
        out_dir: Directory receiving comparison.tsv
        labels: Row labels (default: each config's method)

    Returns:
        One row per configuration, in input order

    Raises:
        ValidationError: If fewer than two configurations are given
        DecipherError: Whatever the first failing run raises
    """
    if len(cfgs) < 2:
        raise ValidationError(f"compare needs at least two configurations, got {len(cfgs)}")
    names = list(labels) if labels is not None else [cfg.method for cfg in cfgs]
    rows = []
    for name, cfg in zip(names, cfgs, strict=True):
        logger.info("Comparison run: %s", name)
        result = pipeline_factory(cfg).run()
        rows.append(
            ComparisonRow(
                method=name,
                seconds_per_iter=result.metrics.seconds_per_iter,
                accuracy=result.metrics.accuracy,
            )
        )
    ReportRepository(out_dir).save_comparison(rows)
    return rows
