"""
Gradient training of the log-linear model with MCMC estimates.

Three estimators of the corpus gradient E^Forced - N E^Full are offered:

- gibbs: Gibbs sampling for the forced expectation and the full expectation
- imh_gibbs: IMH for the forced expectation, Gibbs for the full expectation
- cd: contrastive divergence, which replaces the full expectation with
  the features of a one-step reconstruction of the data

Every method takes plain gradient-ascent steps of size learning_rate on
the gradient divided by N, the number of source bigram tokens. Sampling
for a chunk of source bigrams runs against a frozen weight snapshot with
its own random stream derived from (seed, iteration, stage, chunk), so the
result does not depend on the number of threads.
"""

import logging
import time
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from typing import Literal, TypeVar

import numpy as np
from pydantic import BaseModel, Field

from src.application.services.sampling_service import (
    Proposal,
    batch_features,
    build_proposal,
    build_reverse_proposal,
    gibbs_forced_batch,
    gibbs_full,
    imh_posterior_batch,
    imh_reconstruction_batch,
)
from src.domain.exceptions import DivergenceError, ValidationError
from src.domain.features import FeatureCounts, bigram_phi
from src.domain.loglinear import LogLinearModel
from src.domain.models import BigramTable, IterationRecord, TrainRecord

logger = logging.getLogger(__name__)

CHUNK_SIZE = 256
STAGE_FORCED = 0
STAGE_FULL = 1
STAGE_CD = 2

TrainMethod = Literal["gibbs", "imh_gibbs", "cd"]
T = TypeVar("T")


class SamplerConfig(BaseModel):
    """Hyperparameters shared by the MCMC trainers."""

    n_samples: int = Field(default=50, ge=1, description="Samples per observed bigram per iteration")
    iterations: int = Field(default=50, ge=1)
    learning_rate: float = Field(default=0.05, gt=0.0)
    p_backoff: float = Field(default=0.1, gt=0.0, lt=1.0)
    qs_refresh_period: int = Field(default=5, ge=1, description="Rebuild the proposal every this many iterations")
    rng_seed: int = Field(default=0, ge=0)


def _stream(seed: int, iteration: int, stage: int, chunk: int, step: int = 0) -> np.random.Generator:
    return np.random.default_rng([seed, iteration, stage, chunk, step])


def _chunks(src: BigramTable) -> list[tuple[np.ndarray, np.ndarray, np.ndarray]]:
    f1s, f2s, counts = src.arrays()
    return [
        (f1s[i : i + CHUNK_SIZE], f2s[i : i + CHUNK_SIZE], counts[i : i + CHUNK_SIZE].astype(np.float64))
        for i in range(0, len(counts), CHUNK_SIZE)
    ]


def _map_chunks(func: Callable[[int], T], n_chunks: int, executor: ThreadPoolExecutor | None) -> list[T]:
    """Run func over chunk indices; results come back in chunk order."""
    if executor is None or n_chunks < 2:
        return [func(i) for i in range(n_chunks)]
    return list(executor.map(func, range(n_chunks)))


def _sum_features(parts: list[FeatureCounts]) -> FeatureCounts:
    """Sum chunk results in chunk order with a single coalesce."""
    if not parts:
        return FeatureCounts()
    return FeatureCounts(
        np.concatenate([p.f_ids for p in parts]),
        np.concatenate([p.e_ids for p in parts]),
        np.concatenate([p.values for p in parts]),
        sum(p.ortho for p in parts),
    ).coalesce()


def contrastive_delta(
    m: LogLinearModel, data: tuple[int, int], recon: tuple[int, int], e_pair: tuple[int, int]
) -> FeatureCounts:
    """Phi(data, e) - Phi(recon, e)."""
    return bigram_phi(data, e_pair, m.space) - bigram_phi(recon, e_pair, m.space)


def cd_update(
    m: LogLinearModel,
    proposal: Proposal,
    reverse: Proposal,
    data: tuple[int, int],
    learning_rate: float,
    rng: np.random.Generator,
    state: tuple[int, int] | None = None,
) -> tuple[FeatureCounts, tuple[int, int]]:
    """
    One contrastive-divergence draw for an observed source bigram.

    Samples e1 e2 with one IMH step (from state, or from the proposal when
    no state is given), reconstructs f1 f2 from e1 e2 with one IMH step
    starting at the data, and returns learning_rate times the feature
    difference.

    Args:
        m: Log-linear model
        proposal: Posterior proposal q_u(e | f)
        reverse: Reconstruction proposal q_u(f | e)
        data: Observed source bigram
        learning_rate: Step size multiplying the delta
        rng: Random source
        state: Current latent target bigram of this bigram's chain

    Returns:
        The weight delta and the new latent state
    """
    f1, f2 = np.array([data[0]]), np.array([data[1]])
    start = None if state is None else (np.array([state[0]]), np.array([state[1]]))
    latent = imh_posterior_batch(m, proposal, f1, f2, 1, rng, start=start)
    e1, e2 = latent.e1[:, 0], latent.e2[:, 0]
    r1, r2, _ = imh_reconstruction_batch(m, reverse, e1, e2, (f1, f2), rng)
    e_pair = (int(e1[0]), int(e2[0]))
    delta = contrastive_delta(m, data, (int(r1[0]), int(r2[0])), e_pair)
    return delta.scaled(learning_rate), e_pair


class _Trainer:
    """Iteration loop shared by the three methods."""

    def __init__(
        self,
        m: LogLinearModel,
        src: BigramTable,
        method: TrainMethod,
        cfg: SamplerConfig,
        threads: int,
    ) -> None:
        self.m = m
        self.src = src
        self.method = method
        self.cfg = cfg
        self.threads = threads
        self.chunks = _chunks(src)
        self.n_tokens = float(src.total_tokens)
        self.proposal: Proposal | None = None
        self.reverse: Proposal | None = None

    def refresh(self, iteration: int) -> None:
        if iteration % self.cfg.qs_refresh_period != 0 and self.proposal is not None:
            return
        weights, space = self.m.weights, self.m.space
        self.proposal = build_proposal(weights, space, self.cfg.p_backoff)
        if self.method == "cd":
            self.reverse = build_reverse_proposal(weights, space, self.cfg.p_backoff)
        logger.debug("Proposal rebuilt at iteration %d over %d supported pairs", iteration, weights.n_weights)

    def forced_expectation(
        self, iteration: int, executor: ThreadPoolExecutor | None
    ) -> tuple[FeatureCounts, float | None]:
        """Count-weighted forced expectation summed over the corpus."""
        assert self.proposal is not None
        proposal = self.proposal
        n = self.cfg.n_samples

        def run(index: int) -> tuple[FeatureCounts, int, int]:
            f1, f2, counts = self.chunks[index]
            rng = _stream(self.cfg.rng_seed, iteration, STAGE_FORCED, index)
            if self.method == "gibbs":
                batch = gibbs_forced_batch(self.m, f1, f2, n, rng, proposal)
            else:
                batch = imh_posterior_batch(self.m, proposal, f1, f2, n, rng)
            features = batch_features(self.m.space, f1, f2, batch.e1, batch.e2, counts / n)
            return features, batch.accepted, batch.proposed

        results = _map_chunks(run, len(self.chunks), executor)
        forced = _sum_features([r[0] for r in results])
        proposed = sum(r[2] for r in results)
        accept_rate = sum(r[1] for r in results) / proposed if proposed else None
        return forced, accept_rate

    def expectation_step(
        self, iteration: int, executor: ThreadPoolExecutor | None
    ) -> tuple[FeatureCounts, float | None]:
        """Gradient estimate for gibbs and imh_gibbs, applied once per iteration."""
        forced, accept_rate = self.forced_expectation(iteration, executor)
        rng = _stream(self.cfg.rng_seed, iteration, STAGE_FULL, 0)
        full = gibbs_full(self.m, self.cfg.n_samples, rng, proposal=self.proposal).mean_features
        gradient = forced.scaled(1.0 / self.n_tokens) - full
        self.m.weights.apply(gradient, self.cfg.learning_rate)
        return gradient, accept_rate

    def contrastive_step(
        self, iteration: int, executor: ThreadPoolExecutor | None
    ) -> tuple[FeatureCounts, float | None]:
        """
        Contrastive divergence over n sample batches.

        Batch k draws one retained sample per observed bigram, the latent
        chains persisting across batches, and its update is applied before
        batch k + 1 samples.
        """
        assert self.proposal is not None and self.reverse is not None
        proposal, reverse = self.proposal, self.reverse
        n = self.cfg.n_samples
        states: list[tuple[np.ndarray, np.ndarray] | None] = [None] * len(self.chunks)
        total = FeatureCounts()
        accepted = proposed = 0
        for k in range(n):

            def run(index: int, k: int = k) -> tuple[FeatureCounts, tuple[np.ndarray, np.ndarray], int]:
                f1, f2, counts = self.chunks[index]
                rng = _stream(self.cfg.rng_seed, iteration, STAGE_CD, index, k)
                latent = imh_posterior_batch(self.m, proposal, f1, f2, 1, rng, start=states[index])
                e1, e2 = latent.e1[:, 0], latent.e2[:, 0]
                r1, r2, _ = imh_reconstruction_batch(self.m, reverse, e1, e2, (f1, f2), rng)
                data = batch_features(self.m.space, f1, f2, e1[:, None], e2[:, None], counts)
                recon = batch_features(self.m.space, r1, r2, e1[:, None], e2[:, None], counts)
                return data - recon, (e1, e2), latent.accepted

            results = _map_chunks(run, len(self.chunks), executor)
            batch_delta = _sum_features([r[0] for r in results]).scaled(1.0 / (self.n_tokens * n))
            for index, result in enumerate(results):
                states[index] = result[1]
            accepted += sum(r[2] for r in results)
            proposed += sum(len(chunk[0]) for chunk in self.chunks)
            self.m.weights.apply(batch_delta, self.cfg.learning_rate)
            total = total + batch_delta
        return total, (accepted / proposed if proposed else None)

    def run(
        self, on_iteration: Callable[[IterationRecord], None] | None
    ) -> TrainRecord:
        record = TrainRecord(method=self.method)
        executor = ThreadPoolExecutor(max_workers=self.threads) if self.threads > 1 else None
        try:
            for iteration in range(self.cfg.iterations):
                started = time.perf_counter()
                self.refresh(iteration)
                if self.method == "cd":
                    gradient, accept_rate = self.contrastive_step(iteration, executor)
                else:
                    gradient, accept_rate = self.expectation_step(iteration, executor)
                if not self.m.weights.is_finite_at(gradient.f_ids, gradient.e_ids):
                    raise DivergenceError(iteration + 1, "non-finite weights")
                entry = IterationRecord(
                    iteration=iteration + 1,
                    seconds=time.perf_counter() - started,
                    grad_norm=gradient.norm(),
                    accept_rate=None if self.method == "gibbs" else accept_rate,
                    n_weights=self.m.weights.n_weights,
                )
                record.append(entry)
                logger.info(
                    "%s iteration %d: %.3fs, |g|=%.4g, weights=%d",
                    self.method,
                    entry.iteration,
                    entry.seconds,
                    entry.grad_norm,
                    entry.n_weights,
                )
                if on_iteration is not None:
                    on_iteration(entry)
        finally:
            if executor is not None:
                executor.shutdown()
        return record


def train(
    m: LogLinearModel,
    src: BigramTable,
    method: TrainMethod,
    cfg: SamplerConfig,
    threads: int = 1,
    on_iteration: Callable[[IterationRecord], None] | None = None,
) -> tuple[LogLinearModel, TrainRecord]:
    """
    Train the model in place for cfg.iterations passes over the corpus.

    Args:
        m: Model to train; its weights are updated in place
        src: Observed source bigram counts
        method: gibbs, imh_gibbs or cd
        cfg: Sampler hyperparameters
        threads: Worker threads for per-chunk sampling
        on_iteration: Callback receiving each iteration's record

    Returns:
        The trained model and its per-iteration record

    Raises:
        ValidationError: If the method is unknown, the corpus has no bigrams or threads < 1
        DivergenceError: If an update produces non-finite weights
    """
    if method not in ("gibbs", "imh_gibbs", "cd"):
        raise ValidationError(f"Unknown training method: {method}")
    if src.total_tokens == 0:
        raise ValidationError("Training needs at least one source bigram")
    if threads < 1:
        raise ValidationError(f"threads must be at least 1, got {threads}")
    record = _Trainer(m, src, method, cfg, threads).run(on_iteration)
    return m, record
