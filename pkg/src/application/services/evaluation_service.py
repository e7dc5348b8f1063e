"""
Evaluation of trained models: lexicon extraction, accuracy, decoding, BLEU.
"""

import logging
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from pydantic import BaseModel, Field
from sacrebleu.metrics import BLEU

from src.domain.exceptions import CoverageError, OOVError, ValidationError
from src.domain.language_model import BigramLM
from src.domain.loglinear import DecipherModel, EMModel, LogLinearModel
from src.domain.models import UNK_TOKEN, GoldLexicon, Lexicon

logger = logging.getLogger(__name__)


class AccuracyReport(BaseModel):
    """Lexicon accuracy with the counts behind it."""

    accuracy: float = Field(ge=0.0, le=100.0)
    correct: int = Field(ge=0)
    evaluated: int = Field(ge=0)


def extract_lexicon(model: DecipherModel) -> Lexicon:
    """
    Map every source word to its best target word.

    EM models use argmax_e p(f|e); log-linear models use
    argmax_e [w(f, e) + ortho_weight * ortho(f, e)]. np.argmax returns the
    first maximum, so ties go to the lowest target id.

    Args:
        model: Trained EM or log-linear model

    Returns:
        Lexicon over the whole source vocabulary
    """
    if isinstance(model, EMModel):
        best = np.argmax(model.table.probs, axis=0)
    else:
        best = np.argmax(model.potentials(), axis=1)
    vf, ve = model.vf, model.ve
    return Lexicon(mapping={f: ve.words[int(e)] for f, e in zip(vf.words, best, strict=True)})


def score_lexicon(
    lex: Lexicon, gold: GoldLexicon, excluded: Iterable[str] = (UNK_TOKEN,)
) -> AccuracyReport:
    """
    Score a lexicon against the gold mapping.

    Every lexicon entry except the excluded words is evaluated.

    Raises:
        CoverageError: If the gold lexicon lacks an evaluated word
        ValidationError: If nothing is left to evaluate
    """
    skip = set(excluded)
    evaluated = [f for f in lex.mapping if f not in skip]
    missing = [f for f in evaluated if f not in gold.mapping]
    if missing:
        raise CoverageError(missing)
    if not evaluated:
        raise ValidationError("No source words to evaluate")
    correct = sum(1 for f in evaluated if lex.mapping[f] == gold.mapping[f])
    return AccuracyReport(accuracy=100.0 * correct / len(evaluated), correct=correct, evaluated=len(evaluated))


def accuracy(lex: Lexicon, gold: GoldLexicon, excluded: Iterable[str] = (UNK_TOKEN,)) -> float:
    """Percentage of evaluated source words mapped to their gold translation."""
    return score_lexicon(lex, gold, excluded).accuracy


def _log_emissions(model: DecipherModel, f_ids: np.ndarray) -> np.ndarray:
    if isinstance(model, LogLinearModel):
        return model.potential_rows(f_ids)
    return model.log_emissions(f_ids)


def viterbi_decode(sentence: Sequence[str], model: DecipherModel, lm: BigramLM | None = None) -> list[str]:
    """
    Most probable target sequence for a source sentence.

    Max-product over the bigram chain in log space: the start score is the
    LM's first-word marginal, transitions are p(e_t | e_{t-1}) and
    emissions are p(f|e) for EM or exp(w . phi(f, e)) for log-linear models.

    Args:
        sentence: Source tokens
        model: Trained model
        lm: Target LM (defaults to the model's own)

    Returns:
        Target tokens, one per source token

    Raises:
        OOVError: If a token is not in the source vocabulary
    """
    if not sentence:
        return []
    lm = lm or model.lm
    vf = model.vf
    for token in sentence:
        if token not in vf:
            raise OOVError(token)
    emissions = _log_emissions(model, np.array([vf.id_of(t) for t in sentence], dtype=np.int64))
    with np.errstate(divide="ignore"):
        log_start = np.log(lm.marginal_e1)
    transitions = lm.log_conditional

    delta = log_start + emissions[0]
    backpointers = np.zeros((len(sentence), lm.size), dtype=np.int64)
    for t in range(1, len(sentence)):
        scores = delta[:, None] + transitions
        backpointers[t] = np.argmax(scores, axis=0)
        delta = scores[backpointers[t], np.arange(lm.size)] + emissions[t]

    path = [int(np.argmax(delta))]
    for t in range(len(sentence) - 1, 0, -1):
        path.append(int(backpointers[t, path[-1]]))
    path.reverse()
    return [lm.vocab.words[e] for e in path]


def path_score(sentence: Sequence[str], path: Sequence[str], model: DecipherModel, lm: BigramLM | None = None) -> float:
    """Log score of a target path under the decoding objective."""
    lm = lm or model.lm
    vf = model.vf
    e_ids = [lm.vocab.id_of(e) for e in path]
    emissions = _log_emissions(model, np.array([vf.id_of(t) for t in sentence], dtype=np.int64))
    with np.errstate(divide="ignore"):
        total = float(np.log(lm.marginal_e1[e_ids[0]]))
    total += float(emissions[0, e_ids[0]])
    for t in range(1, len(e_ids)):
        total += float(lm.log_conditional[e_ids[t - 1], e_ids[t]] + emissions[t, e_ids[t]])
    return total


def decode_sentences(
    sentences: Sequence[Sequence[str]], model: DecipherModel, lm: BigramLM | None = None, threads: int = 1
) -> list[list[str]]:
    """
    Decode many sentences, in input order.

    Raises:
        OOVError: For the first sentence (by line) holding an unknown token;
            every OOV line is logged before raising
    """
    vf = model.vf
    oov = [(i + 1, t) for i, s in enumerate(sentences) for t in s if t not in vf]
    if oov:
        for line_number, token in oov:
            logger.warning("Line %d: unknown source token '%s'", line_number, token)
        raise OOVError(oov[0][1], line_number=oov[0][0])

    def run(sentence: Sequence[str]) -> list[str]:
        return viterbi_decode(sentence, model, lm)

    if threads > 1 and len(sentences) > 1:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            return list(executor.map(run, sentences))
    return [run(s) for s in sentences]


def bleu(hypotheses: Sequence[Sequence[str]], references: Sequence[Sequence[str]]) -> float:
    """
    Corpus BLEU with uniform n-gram weights and brevity penalty.

    The maximum n-gram order is 4, capped at the length of the shortest
    reference.

    Args:
        hypotheses: Tokenized system outputs
        references: One tokenized reference per hypothesis

    Returns:
        Score in [0, 100]

    Raises:
        ValidationError: If the lists are empty or differ in length
    """
    if not hypotheses:
        raise ValidationError("BLEU needs at least one hypothesis")
    if len(hypotheses) != len(references):
        raise ValidationError(
            f"BLEU needs one reference per hypothesis, got {len(hypotheses)} and {len(references)}"
        )
    order = max(1, min(4, min(len(r) for r in references)))
    metric = BLEU(tokenize="none", smooth_method="none", max_ngram_order=order, force=True)
    result = metric.corpus_score([" ".join(h) for h in hypotheses], [[" ".join(r) for r in references]])
    return float(result.score)
