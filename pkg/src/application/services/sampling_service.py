"""
MCMC samplers for the forced and full feature expectations.

Forced expectations are estimated per observed source bigram with either
Gibbs sampling over the latent target bigram or independent
Metropolis-Hastings (IMH) with a sparse proposal. The full expectation is
estimated by Gibbs sampling over source bigrams, where each conditional
p(f1 | f2) is approximated with a fresh set of target bigrams drawn from
the language model. Chains for many source bigrams advance together as
vectorized batches.
"""

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy.special import logsumexp

from src.application.services.language_model_service import sample_bigrams
from src.domain.exceptions import ValidationError
from src.domain.features import FeatureCounts, FeatureSpace, WeightVector
from src.domain.loglinear import LogLinearModel


class Proposal:
    """
    IMH proposal q_u(c | r) = (1 - p_b) q_s(c | r) + p_b / V over rows r.

    q_s(. | r) is a softmax of the log-potentials over the supported cells
    of row r. Rows without support fall back to the uniform distribution.
    Rows are source words and columns target words for the posterior
    proposal; the reconstruction proposal is the transpose.
    """

    def __init__(
        self, rows: np.ndarray, cols: np.ndarray, logits: np.ndarray, n_rows: int, n_cols: int, p_backoff: float
    ) -> None:
        """
        Build the proposal from supported cells sorted by (row, col).

        Args:
            rows: Row id of every supported cell, non-decreasing
            cols: Column id of every supported cell
            logits: Log-potential of every supported cell
            n_rows: Number of rows
            n_cols: Number of columns (V of the back-off term)
            p_backoff: Back-off probability in (0, 1)

        Raises:
            ValidationError: If p_backoff is outside (0, 1)
        """
        if not 0.0 < p_backoff < 1.0:
            raise ValidationError(f"Back-off probability must be in (0, 1), got {p_backoff}")
        self.n_rows = n_rows
        self.n_cols = n_cols
        self.p_backoff = p_backoff
        self.cols = np.asarray(cols, dtype=np.int64)
        rows = np.asarray(rows, dtype=np.int64)
        self.row_sizes = np.bincount(rows, minlength=n_rows)
        self.row_ptr = np.concatenate([[0], np.cumsum(self.row_sizes)])
        self.linear = rows * n_cols + self.cols

        self.probs = np.zeros(len(rows), dtype=np.float64)
        self.keys = np.zeros(len(rows), dtype=np.float64)
        if len(rows):
            nonempty = self.row_sizes > 0
            starts = self.row_ptr[:-1][nonempty]
            sizes = self.row_sizes[nonempty]
            row_max = np.maximum.reduceat(logits, starts)
            weights = np.exp(logits - np.repeat(row_max, sizes))
            row_sum = np.add.reduceat(weights, starts)
            self.probs = weights / np.repeat(row_sum, sizes)
            # within-row cumulative mass offset by the row id gives one increasing key array
            cumulative = np.cumsum(self.probs)
            before = np.repeat(cumulative[starts] - self.probs[starts], sizes)
            within = cumulative - before
            within[self.row_ptr[1:][nonempty] - 1] = 1.0
            self.keys = rows + within

    def qs(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        """Sparse softmax q_s(col | row); zero outside the support."""
        linear = np.asarray(rows, dtype=np.int64) * self.n_cols + np.asarray(cols, dtype=np.int64)
        if len(self.linear) == 0:
            return np.zeros(linear.shape, dtype=np.float64)
        pos = np.minimum(np.searchsorted(self.linear, linear), len(self.linear) - 1)
        found = self.linear[pos] == linear
        return np.where(found, self.probs[pos], 0.0)

    def prob(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        """Mixture probability q_u(col | row)."""
        rows = np.asarray(rows, dtype=np.int64)
        mixture = (1.0 - self.p_backoff) * self.qs(rows, cols) + self.p_backoff / self.n_cols
        return np.where(self.row_sizes[rows] > 0, mixture, 1.0 / self.n_cols)

    def log_prob(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        return np.log(self.prob(rows, cols))

    def sample(self, rows: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Draw one column for every entry of rows."""
        rows = np.asarray(rows, dtype=np.int64)
        uniform = rng.integers(0, self.n_cols, size=rows.shape)
        backoff = rng.random(rows.shape) < self.p_backoff
        u = rng.random(rows.shape)
        has_support = self.row_sizes[rows] > 0
        if not np.any(has_support):
            return uniform
        pos = np.searchsorted(self.keys, rows + u, side="right")
        pos = np.clip(pos, self.row_ptr[rows], np.maximum(self.row_ptr[rows + 1] - 1, self.row_ptr[rows]))
        sparse = self.cols[np.minimum(pos, len(self.cols) - 1)]
        return np.where(has_support & ~backoff, sparse, uniform)


def _supported_cells(support: np.ndarray, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    rows, cols = np.nonzero(support)
    return rows, cols, theta[rows, cols]


def build_proposal(weights: WeightVector, space: FeatureSpace, p_backoff: float) -> Proposal:
    """
    Posterior proposal q_u(e | f) from the current sparse weights.

    q_s(e | f) = exp(w . phi(f, e)) / Z over the supported pairs of f.
    """
    theta = weights.values + weights.ortho_weight * space.ortho_mask
    rows, cols, logits = _supported_cells(weights.support, theta)
    return Proposal(rows, cols, logits, len(space.vf), len(space.ve), p_backoff)


def build_reverse_proposal(weights: WeightVector, space: FeatureSpace, p_backoff: float) -> Proposal:
    """Reconstruction proposal q_u(f | e) from the transposed weights, backing off to uniform over V_F."""
    theta = (weights.values + weights.ortho_weight * space.ortho_mask).T
    rows, cols, logits = _supported_cells(weights.support.T, theta)
    return Proposal(rows, cols, logits, len(space.ve), len(space.vf), p_backoff)


class ChainResult(BaseModel):
    """Samples of one chain with their mean feature vector."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    samples: list[tuple[int, ...]]
    mean_features: FeatureCounts
    acceptance_rate: float | None = None


class BatchSamples(BaseModel):
    """Per-chain sample arrays of shape (chains, n) and the acceptance count."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    e1: np.ndarray
    e2: np.ndarray
    accepted: int = 0
    proposed: int = 0


def _sample_rows(logits: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Draw one index per row from softmax(logits) by inverse CDF."""
    shifted = logits - logits.max(axis=1, keepdims=True)
    cdf = np.cumsum(np.exp(shifted), axis=1)
    u = rng.random(len(logits)) * cdf[:, -1]
    return np.minimum((cdf <= u[:, None]).sum(axis=1), logits.shape[1] - 1)


def _initial_targets(
    m: LogLinearModel, proposal: Proposal, f1: np.ndarray, f2: np.ndarray, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Initial latent bigrams drawn from q; draws the LM gives no mass are replaced by LM samples."""
    e1 = proposal.sample(f1, rng)
    e2 = proposal.sample(f2, rng)
    dead = np.isneginf(m.lm.log_joint[e1, e2])
    if np.any(dead):
        lm_e1, lm_e2 = sample_bigrams(m.lm, rng, int(dead.sum()))
        e1[dead] = lm_e1
        e2[dead] = lm_e2
    return e1, e2


def gibbs_forced_batch(
    m: LogLinearModel,
    f1: np.ndarray,
    f2: np.ndarray,
    n: int,
    rng: np.random.Generator,
    proposal: Proposal,
    start: tuple[np.ndarray, np.ndarray] | None = None,
) -> BatchSamples:
    """
    Gibbs chains over latent target bigrams, one chain per source bigram.

    Step k resamples e1 from P(e1 | e2, f1 f2) when k is odd and e2 from
    P(e2 | e1, f1 f2) when k is even; every step yields one sample.

    Args:
        m: Log-linear model (read-only)
        f1: First source word of each chain
        f2: Second source word of each chain
        n: Number of samples per chain
        rng: Random source owned by the caller
        proposal: Proposal used for the initial state
        start: Optional initial (e1, e2) instead of a proposal draw

    Returns:
        Sample arrays of shape (chains, n)
    """
    theta1 = m.potential_rows(f1)
    theta2 = m.potential_rows(f2)
    log_joint = m.lm.log_joint
    e1, e2 = (start[0].copy(), start[1].copy()) if start is not None else _initial_targets(m, proposal, f1, f2, rng)
    out1 = np.empty((len(f1), n), dtype=np.int64)
    out2 = np.empty((len(f1), n), dtype=np.int64)
    for step in range(n):
        if step % 2 == 0:
            e1 = _sample_rows(log_joint[:, e2].T + theta1, rng)
        else:
            e2 = _sample_rows(log_joint[e1, :] + theta2, rng)
        out1[:, step] = e1
        out2[:, step] = e2
    return BatchSamples(e1=out1, e2=out2)


def imh_posterior_batch(
    m: LogLinearModel,
    proposal: Proposal,
    f1: np.ndarray,
    f2: np.ndarray,
    n: int,
    rng: np.random.Generator,
    start: tuple[np.ndarray, np.ndarray] | None = None,
) -> BatchSamples:
    """
    IMH chains over latent target bigrams, one chain per source bigram.

    Proposals e1' e2' ~ q_u(e1' | f1) q_u(e2' | f2) are accepted with
    probability min(1, [p~(new) / p~(cur)] [q(cur) / q(new)]) where p~ is
    the unnormalized joint. A rejection repeats the current state.

    Args:
        m: Log-linear model (read-only)
        proposal: Posterior proposal q_u(e | f)
        f1: First source word of each chain
        f2: Second source word of each chain
        n: Number of samples per chain
        rng: Random source owned by the caller
        start: Optional current state; drawn from q when omitted

    Returns:
        Sample arrays of shape (chains, n) with acceptance counts
    """
    if start is None:
        e1 = proposal.sample(f1, rng)
        e2 = proposal.sample(f2, rng)
    else:
        e1, e2 = start[0].copy(), start[1].copy()
    log_joint = m.lm.log_joint

    def log_target(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return log_joint[a, b] + m.potential_at(f1, a) + m.potential_at(f2, b)

    def log_q(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return proposal.log_prob(f1, a) + proposal.log_prob(f2, b)

    current_p = log_target(e1, e2)
    current_q = log_q(e1, e2)
    out1 = np.empty((len(f1), n), dtype=np.int64)
    out2 = np.empty((len(f1), n), dtype=np.int64)
    accepted = 0
    for step in range(n):
        new1 = proposal.sample(f1, rng)
        new2 = proposal.sample(f2, rng)
        new_p = log_target(new1, new2)
        new_q = log_q(new1, new2)
        u = rng.random(len(f1))
        with np.errstate(invalid="ignore"):
            log_ratio = (new_p - current_p) + (current_q - new_q)
            accept = u < np.exp(np.minimum(log_ratio, 0.0))
        # a state without mass accepts any move
        accept |= np.isneginf(current_p)
        e1 = np.where(accept, new1, e1)
        e2 = np.where(accept, new2, e2)
        current_p = np.where(accept, new_p, current_p)
        current_q = np.where(accept, new_q, current_q)
        accepted += int(accept.sum())
        out1[:, step] = e1
        out2[:, step] = e2
    return BatchSamples(e1=out1, e2=out2, accepted=accepted, proposed=len(f1) * n)


def imh_reconstruction_batch(
    m: LogLinearModel,
    reverse: Proposal,
    e1: np.ndarray,
    e2: np.ndarray,
    data: tuple[np.ndarray, np.ndarray],
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    One IMH step per chain targeting p(f1 f2 | e1 e2), proportional to exp(w . Phi).

    The chain starts at the observed source bigram.

    Returns:
        Reconstructed (f1, f2) and the per-chain acceptance flags
    """
    f1, f2 = data
    new1 = reverse.sample(e1, rng)
    new2 = reverse.sample(e2, rng)
    log_ratio = (
        (m.potential_at(new1, e1) + m.potential_at(new2, e2))
        - (m.potential_at(f1, e1) + m.potential_at(f2, e2))
        + (reverse.log_prob(e1, f1) + reverse.log_prob(e2, f2))
        - (reverse.log_prob(e1, new1) + reverse.log_prob(e2, new2))
    )
    accept = rng.random(len(e1)) < np.exp(np.minimum(log_ratio, 0.0))
    return np.where(accept, new1, f1), np.where(accept, new2, f2), accept


def batch_features(
    space: FeatureSpace, f1: np.ndarray, f2: np.ndarray, e1: np.ndarray, e2: np.ndarray, weights: np.ndarray
) -> FeatureCounts:
    """
    Weighted sum of Phi over chain samples.

    e1 and e2 have shape (chains, n); weights has one entry per chain and
    is applied to every sample of that chain.
    """
    n = e1.shape[1]
    f_ids = np.concatenate([np.repeat(f1, n), np.repeat(f2, n)])
    e_ids = np.concatenate([e1.ravel(), e2.ravel()])
    values = np.concatenate([np.repeat(weights, n), np.repeat(weights, n)])
    return FeatureCounts.from_pairs(f_ids, e_ids, values, space)


def gibbs_forced(
    m: LogLinearModel, f_pair: tuple[int, int], n: int, rng: np.random.Generator, proposal: Proposal | None = None
) -> ChainResult:
    """
    Gibbs estimate of the forced expectation for one source bigram.

    Args:
        m: Log-linear model
        f_pair: Observed source bigram
        n: Number of samples (one per alternation step)
        rng: Random source
        proposal: Proposal for the initial state (built from m when omitted)

    Returns:
        The n sampled target bigrams and their mean feature vector

    Raises:
        ValidationError: If n < 1
    """
    if n < 1:
        raise ValidationError(f"Number of samples must be at least 1, got {n}")
    proposal = proposal or build_proposal(m.weights, m.space, 0.1)
    f1, f2 = np.array([f_pair[0]]), np.array([f_pair[1]])
    batch = gibbs_forced_batch(m, f1, f2, n, rng, proposal)
    samples = [(int(a), int(b)) for a, b in zip(batch.e1[0], batch.e2[0], strict=True)]
    features = batch_features(m.space, f1, f2, batch.e1, batch.e2, np.array([1.0 / n]))
    return ChainResult(samples=samples, mean_features=features)


def imh_posterior(
    m: LogLinearModel, prop: Proposal, f_pair: tuple[int, int], n: int, rng: np.random.Generator
) -> ChainResult:
    """
    IMH estimate of the forced expectation for one source bigram.

    Raises:
        ValidationError: If n < 1
    """
    if n < 1:
        raise ValidationError(f"Number of samples must be at least 1, got {n}")
    f1, f2 = np.array([f_pair[0]]), np.array([f_pair[1]])
    batch = imh_posterior_batch(m, prop, f1, f2, n, rng)
    samples = [(int(a), int(b)) for a, b in zip(batch.e1[0], batch.e2[0], strict=True)]
    features = batch_features(m.space, f1, f2, batch.e1, batch.e2, np.array([1.0 / n]))
    return ChainResult(samples=samples, mean_features=features, acceptance_rate=batch.accepted / batch.proposed)


def imh_reconstruction(
    m: LogLinearModel,
    prop_src: Proposal,
    e_pair: tuple[int, int],
    rng: np.random.Generator,
    start: tuple[int, int] | None = None,
) -> tuple[int, int]:
    """
    Reconstruct a source bigram for the latent target bigram e1 e2.

    Runs one IMH step targeting p(f1 f2 | e1 e2) with the mirrored
    proposal q_u(f | e). The step starts at start (the observed data in
    contrastive divergence) or at a draw from the proposal.
    """
    e1, e2 = np.array([e_pair[0]]), np.array([e_pair[1]])
    if start is None:
        start = (int(prop_src.sample(e1, rng)[0]), int(prop_src.sample(e2, rng)[0]))
    f1, f2, _ = imh_reconstruction_batch(m, prop_src, e1, e2, (np.array([start[0]]), np.array([start[1]])), rng)
    return int(f1[0]), int(f2[0])


def gibbs_full(
    m: LogLinearModel,
    n: int,
    rng: np.random.Generator,
    inner_samples: int | None = None,
    latent_sweeps: int = 1,
    proposal: Proposal | None = None,
) -> ChainResult:
    """
    Gibbs estimate of the full expectation over (f1 f2, e1 e2).

    Step k resamples f1 from p(f1 | f2) when k is odd and f2 from
    p(f2 | f1) when k is even. Each conditional is approximated with a
    fresh set S of target bigrams drawn from the LM:
    p(f1 | f2) proportional to sum over (e1, e2) in S of exp(theta[f1, e1] + theta[f2, e2]).
    The latent target bigram then takes latent_sweeps Gibbs sweeps given
    the new source bigram, continuing from its previous state, and the
    joint configuration is recorded.

    Args:
        m: Log-linear model
        n: Number of retained source samples
        rng: Random source
        inner_samples: Size of each LM sample set S (defaults to n)
        latent_sweeps: Gibbs sweeps over e1 e2 per retained sample
        proposal: Proposal for the initial latent state

    Returns:
        Sampled (f1, f2, e1, e2) tuples and their mean feature vector

    Raises:
        ValidationError: If n, inner_samples or latent_sweeps is below 1
    """
    inner = n if inner_samples is None else inner_samples
    if n < 1 or inner < 1 or latent_sweeps < 1:
        raise ValidationError("Sample counts and sweeps must be at least 1")
    proposal = proposal or build_proposal(m.weights, m.space, 0.1)
    size_f = len(m.vf)
    f1 = rng.integers(0, size_f, size=1)
    f2 = rng.integers(0, size_f, size=1)
    e1, e2 = _initial_targets(m, proposal, f1, f2, rng)

    f_log = np.empty((n, 2), dtype=np.int64)
    e_log = np.empty((n, 2), dtype=np.int64)
    for step in range(n):
        s1, s2 = sample_bigrams(m.lm, rng, inner)
        if step % 2 == 0:
            # p(f1 | f2): theta[:, s1] varies with f1, theta[f2, s2] is shared
            logits = logsumexp(m.potential_cols(s1) + m.potential_at(np.repeat(f2, inner), s2)[None, :], axis=1)
            f1 = _sample_rows(logits[None, :], rng)
        else:
            logits = logsumexp(m.potential_cols(s2) + m.potential_at(np.repeat(f1, inner), s1)[None, :], axis=1)
            f2 = _sample_rows(logits[None, :], rng)
        latent = gibbs_forced_batch(m, f1, f2, 2 * latent_sweeps, rng, proposal, start=(e1, e2))
        e1, e2 = latent.e1[:, -1], latent.e2[:, -1]
        f_log[step] = (f1[0], f2[0])
        e_log[step] = (e1[0], e2[0])

    samples = [(int(a), int(b), int(c), int(d)) for (a, b), (c, d) in zip(f_log, e_log, strict=True)]
    features = FeatureCounts.from_pairs(
        np.concatenate([f_log[:, 0], f_log[:, 1]]), np.concatenate([e_log[:, 0], e_log[:, 1]]), 1.0 / n, m.space
    )
    return ChainResult(samples=samples, mean_features=features)
