"""
Exact, brute-force computations under the log-linear model.

These enumerate every latent target bigram (and, for the full
expectation, every source bigram), so they are only feasible for tiny
vocabularies. They serve as the correctness oracle for the samplers.
"""

import numpy as np
from scipy.special import logsumexp

from src.domain.exceptions import EnumerationSizeError, NumericalDegeneracyError
from src.domain.features import FeatureCounts
from src.domain.loglinear import LogLinearModel
from src.domain.models import BigramTable

MAX_POSTERIOR_TARGETS = 64
MAX_FULL_CONFIGURATIONS = 10**7


def _check_posterior_size(m: LogLinearModel) -> None:
    if len(m.ve) > MAX_POSTERIOR_TARGETS:
        raise EnumerationSizeError(
            f"Exact posterior needs |V_E| <= {MAX_POSTERIOR_TARGETS}, got {len(m.ve)}"
        )


def _check_full_size(m: LogLinearModel) -> None:
    configurations = len(m.vf) ** 2 * len(m.ve) ** 2
    if configurations > MAX_FULL_CONFIGURATIONS:
        raise EnumerationSizeError(
            f"Exact full expectation needs |V_F|^2 |V_E|^2 <= {MAX_FULL_CONFIGURATIONS}, got {configurations}"
        )


def unnorm_joint(m: LogLinearModel, f_pair: tuple[int, int], e_pair: tuple[int, int]) -> float:
    """p(e1 e2) * exp(w . Phi(f1 f2, e1 e2))."""
    return float(m.lm.joint[e_pair[0], e_pair[1]] * np.exp(m.score(f_pair, e_pair)))


def _log_posterior_table(m: LogLinearModel, f_pair: tuple[int, int]) -> np.ndarray:
    rows = m.potential_rows(np.array(f_pair))
    return m.lm.log_joint + rows[0][:, None] + rows[1][None, :]


def exact_posterior(m: LogLinearModel, f_pair: tuple[int, int]) -> np.ndarray:
    """
    Posterior p(e1 e2 | f1 f2) over all target bigrams.

    Args:
        m: Log-linear model
        f_pair: Observed source bigram (f1, f2)

    Returns:
        |V_E| x |V_E| matrix summing to 1, indexed [e1, e2]

    Raises:
        EnumerationSizeError: If |V_E| exceeds the enumeration guard
        NumericalDegeneracyError: If every target bigram has zero mass
    """
    _check_posterior_size(m)
    log_table = _log_posterior_table(m, f_pair)
    log_z = logsumexp(log_table)
    if not np.isfinite(log_z):
        raise NumericalDegeneracyError(f"Source bigram {f_pair} has zero posterior mass")
    return np.exp(log_table - log_z)


def exact_forced_expectation(m: LogLinearModel, src: BigramTable) -> FeatureCounts:
    """
    Sum over observed source bigrams (weighted by count) of E_posterior[Phi].

    Raises:
        EnumerationSizeError: If |V_E| exceeds the enumeration guard
    """
    _check_posterior_size(m)
    size = len(m.ve)
    targets = np.arange(size)
    f_parts: list[np.ndarray] = []
    e_parts: list[np.ndarray] = []
    v_parts: list[np.ndarray] = []
    ortho = 0.0
    for (f1, f2), count in src.entries.items():
        posterior = exact_posterior(m, (f1, f2))
        first = count * posterior.sum(axis=1)
        second = count * posterior.sum(axis=0)
        f_parts.extend([np.full(size, f1), np.full(size, f2)])
        e_parts.extend([targets, targets])
        v_parts.extend([first, second])
        ortho += float(first @ m.space.ortho_mask[f1] + second @ m.space.ortho_mask[f2])
    if not f_parts:
        return FeatureCounts()
    return FeatureCounts(np.concatenate(f_parts), np.concatenate(e_parts), np.concatenate(v_parts), ortho).coalesce()


def exact_full_expectation(m: LogLinearModel) -> FeatureCounts:
    """
    Expectation of Phi under the joint over (f1 f2, e1 e2), normalized by Z_g.

    Summing exp(theta) over the source side first gives a closed form:
    with A[f, e] = exp(theta[f, e]) and B[e] = sum_f A[f, e], the marginal
    of (f1, e1) is A[f1, e1] * sum_e2 p(e1 e2) B[e2] / Z_g, and symmetrically
    for (f2, e2).

    Raises:
        EnumerationSizeError: If |V_F|^2 |V_E|^2 exceeds the enumeration guard
    """
    _check_full_size(m)
    theta = m.potentials()
    A = np.exp(theta - theta.max())
    B = A.sum(axis=0)
    joint = m.lm.joint
    first = joint @ B
    second = B @ joint
    z_g = float(B @ first)
    if z_g <= 0.0:
        raise NumericalDegeneracyError("Global normalizer is zero")
    expected = A * (first + second)[None, :] / z_g
    ortho = float((expected * m.space.ortho_mask).sum())
    return FeatureCounts.from_dense(expected, ortho)


def exact_gradient(m: LogLinearModel, src: BigramTable) -> FeatureCounts:
    """Forced expectation minus N times the full expectation (N = source bigram tokens)."""
    forced = exact_forced_expectation(m, src)
    full = exact_full_expectation(m)
    return forced - full.scaled(float(src.total_tokens))


def exact_loglik(m: LogLinearModel, src: BigramTable) -> float:
    """
    Log-likelihood of the observed source bigrams.

    Equals sum over f1 f2 of count * (log Z(f1 f2) - log Z_g), where Z_g sums
    Z(f1 f2) over every source bigram.

    Raises:
        EnumerationSizeError: If an enumeration guard is exceeded
    """
    _check_posterior_size(m)
    _check_full_size(m)
    theta = m.potentials()
    log_b = logsumexp(theta, axis=0)
    log_z_g = float(logsumexp(m.lm.log_joint + log_b[:, None] + log_b[None, :]))
    total = 0.0
    for (f1, f2), count in src.entries.items():
        total += count * (float(logsumexp(_log_posterior_table(m, (f1, f2)))) - log_z_g)
    return total
