"""
Exact EM over the generative HMM baseline.

For every observed source bigram f1 f2 with count c, the E-step computes
the posterior over target bigrams,
p(e1 e2 | f1 f2) proportional to p(e1 e2) p(f1|e1) p(f2|e2),
and accumulates c-weighted expected counts for (e1, f1) and (e2, f2).
The M-step renormalizes the counts per target word.
"""

import logging
import time
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from src.domain.exceptions import NumericalDegeneracyError, ValidationError
from src.domain.language_model import BigramLM
from src.domain.models import BigramTable, IterationRecord, TrainRecord, TranslationTable, Vocab

logger = logging.getLogger(__name__)

EM_CHUNK_SIZE = 256


def em_init(vf: Vocab, ve: Vocab) -> TranslationTable:
    """
    Uniform translation table: every p(f|e) = 1/|V_F|.

    Raises:
        ValidationError: If either vocabulary is empty
    """
    if len(vf) == 0 or len(ve) == 0:
        raise ValidationError("EM needs non-empty source and target vocabularies")
    return TranslationTable(probs=np.full((len(ve), len(vf)), 1.0 / len(vf)))


def _expected_counts(
    probs: np.ndarray, joint: np.ndarray, f1s: np.ndarray, f2s: np.ndarray, counts: np.ndarray
) -> tuple[np.ndarray, float]:
    """E-step over one chunk of unique source bigrams."""
    expected = np.zeros_like(probs)
    loglik = 0.0
    for f1, f2, c in zip(f1s, f2s, counts, strict=True):
        column1 = probs[:, f1]
        column2 = probs[:, f2]
        scale1 = column1.max()
        scale2 = column2.max()
        if scale1 <= 0.0 or scale2 <= 0.0:
            raise NumericalDegeneracyError(f"Source bigram ({f1}, {f2}) has zero posterior mass")
        posterior = joint * np.outer(column1 / scale1, column2 / scale2)
        mass = posterior.sum()
        if mass <= 0.0:
            raise NumericalDegeneracyError(f"Source bigram ({f1}, {f2}) has zero posterior mass")
        loglik += c * (np.log(mass) + np.log(scale1) + np.log(scale2))
        posterior *= c / mass
        expected[:, f1] += posterior.sum(axis=1)
        expected[:, f2] += posterior.sum(axis=0)
    return expected, float(loglik)


def em_iterate(
    table: TranslationTable, src: BigramTable, lm: BigramLM, threads: int = 1
) -> tuple[TranslationTable, float]:
    """
    Run one EM iteration.

    Args:
        table: Current translation table
        src: Source bigram counts
        lm: Target language model
        threads: Worker threads for the E-step

    Returns:
        The re-estimated table and the log-likelihood under the INPUT table

    Raises:
        NumericalDegeneracyError: If some source bigram has zero posterior mass
    """
    f1s, f2s, counts = src.arrays()
    bounds = range(0, len(counts), EM_CHUNK_SIZE)
    chunks = [(f1s[i : i + EM_CHUNK_SIZE], f2s[i : i + EM_CHUNK_SIZE], counts[i : i + EM_CHUNK_SIZE]) for i in bounds]

    def run(chunk: tuple[np.ndarray, np.ndarray, np.ndarray]) -> tuple[np.ndarray, float]:
        return _expected_counts(table.probs, lm.joint, *chunk)

    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            partials = list(executor.map(run, chunks))
    else:
        partials = [run(chunk) for chunk in chunks]

    # merge in chunk order so results do not depend on the thread count
    expected = np.zeros_like(table.probs)
    loglik = 0.0
    for partial_counts, partial_loglik in partials:
        expected += partial_counts
        loglik += partial_loglik

    row_sums = expected.sum(axis=1, keepdims=True)
    probs = np.where(row_sums > 0, expected / np.where(row_sums > 0, row_sums, 1.0), table.probs)
    return TranslationTable(probs=probs), loglik


def run_em(
    src: BigramTable,
    lm: BigramLM,
    vf: Vocab,
    iters: int,
    table: TranslationTable | None = None,
    threads: int = 1,
    on_iteration: Callable[[IterationRecord], None] | None = None,
) -> tuple[TranslationTable, TrainRecord]:
    """
    Apply em_iterate iters times starting from the uniform table.

    Args:
        src: Source bigram counts
        lm: Target language model
        vf: Source vocabulary
        iters: Number of iterations (at least 1)
        table: Optional starting table instead of the uniform one
        threads: Worker threads for the E-step
        on_iteration: Callback receiving each iteration's record

    Returns:
        Final table and the per-iteration record, whose log_likelihoods
        property is the log-likelihood trace

    Raises:
        ValidationError: If iters < 1
    """
    if iters < 1:
        raise ValidationError(f"EM needs at least one iteration, got {iters}")
    current = table if table is not None else em_init(vf, lm.vocab)
    record = TrainRecord(method="em")
    for iteration in range(1, iters + 1):
        started = time.perf_counter()
        current, loglik = em_iterate(current, src, lm, threads=threads)
        entry = IterationRecord(
            iteration=iteration,
            seconds=time.perf_counter() - started,
            n_weights=int(np.count_nonzero(current.probs)),
            log_likelihood=loglik,
        )
        record.append(entry)
        logger.debug("EM iteration %d: log-likelihood %.6f", iteration, loglik)
        if on_iteration is not None:
            on_iteration(entry)
    return current, record
