from typing import Sequence

import numpy as np
from scipy.special import gammaln, softmax

from app.core.exceptions import InvalidPermutationError, InvalidSimplexError
from app.core.seeding import make_generator
from app.domain.losses.base import LossResult

SIMPLEX_TOLERANCE = 1e-9


def _check_prefix(perm_prefix, top_k: int, list_len: int) -> np.ndarray:
    prefix = np.asarray(perm_prefix, dtype=np.int64).ravel()
    if top_k > list_len:
        raise InvalidPermutationError(f"top_k={top_k} exceeds list length {list_len}")
    if prefix.size != top_k:
        raise InvalidPermutationError(f"expected {top_k} indices, got {prefix.size}")
    if np.unique(prefix).size != prefix.size:
        raise InvalidPermutationError(f"repeated indices in {prefix.tolist()}")
    if prefix.size and (prefix.min() < 0 or prefix.max() >= list_len):
        raise InvalidPermutationError(f"indices out of range for list length {list_len}")
    return prefix


def _complete(prefix: np.ndarray, list_len: int) -> np.ndarray:
    """Sampled prefix followed by the unsampled items in ascending index order."""
    tail = np.setdiff1d(np.arange(list_len), prefix, assume_unique=True)
    return np.concatenate([prefix, tail])


def plackett_luce_log_prob(perm_prefix: Sequence[int], scores, top_k: int, list_len: int) -> float:
    """Log-probability of a top-K prefix under the Plackett-Luce model.

    Includes the -ln((L-K)!) constant; it never affects gradients.
    """
    s = np.asarray(scores, dtype=np.float64).ravel()
    if s.size != list_len:
        raise InvalidPermutationError(f"list_len={list_len} but {s.size} scores given")
    prefix = _check_prefix(perm_prefix, top_k, list_len)
    ordered = s[_complete(prefix, list_len)]
    # suffix log-sum-exp: entry j is log sum_{l >= j} exp(s_pi(l))
    suffix_lse = np.logaddexp.accumulate(ordered[::-1])[::-1]
    return float(-gammaln(list_len - top_k + 1) + np.sum(ordered[:top_k] - suffix_lse[:top_k]))


def _neg_log_prob_gradient(prefix: np.ndarray, s: np.ndarray) -> np.ndarray:
    gradient = np.zeros(s.size)
    remaining = np.ones(s.size, dtype=bool)
    for item in prefix:
        idx = np.flatnonzero(remaining)
        gradient[idx] += softmax(s[idx])
        gradient[item] -= 1.0
        remaining[item] = False
    return gradient


def check_simplex(probs) -> np.ndarray:
    p = np.asarray(probs, dtype=np.float64).ravel()
    if p.size < 1 or not np.all(np.isfinite(p)) or np.any(p < 0):
        raise InvalidSimplexError("probabilities must be finite and nonnegative")
    if abs(p.sum() - 1.0) > SIMPLEX_TOLERANCE:
        raise InvalidSimplexError(f"probabilities sum to {p.sum()!r}, not 1")
    return p


def sample_top_k_permutations(teacher_probs, top_k: int, num_samples: int, rng: np.random.Generator) -> np.ndarray:
    """Draw length-K Plackett-Luce prefixes with the Gumbel-top-k trick.

    Adding Gumbel noise to log-probabilities and sorting is equivalent to
    sequential sampling without replacement. Zero-mass items come after all
    positive-mass items, in uniformly random order among themselves.
    """
    p = check_simplex(teacher_probs)
    if not 1 <= top_k <= p.size:
        raise InvalidPermutationError(f"top_k={top_k} outside [1, {p.size}]")
    positive = p > 0
    log_p = np.log(np.where(positive, p, 1.0))
    keys = log_p[None, :] + rng.gumbel(size=(num_samples, p.size))
    zero_mass = np.broadcast_to((~positive).astype(np.float64), keys.shape)
    order = np.lexsort((-keys, zero_mass), axis=-1)
    return order[:, :top_k]


def sample_top_k_permutation(teacher_probs, top_k: int, seed: int) -> np.ndarray:
    """One Plackett-Luce prefix of length K; identical for identical seeds."""
    return sample_top_k_permutations(teacher_probs, top_k, 1, make_generator(seed))[0]


def loss_rankdistil(teacher_probs, scores, top_k: int, num_samples: int = 8, seed: int = 0) -> LossResult:
    """Expected negative Plackett-Luce log-likelihood of teacher-sampled prefixes."""
    s = np.asarray(scores, dtype=np.float64).ravel()
    p = check_simplex(teacher_probs)
    if p.size != s.size:
        raise InvalidSimplexError(f"{p.size} probabilities for {s.size} scores")
    samples = sample_top_k_permutations(p, top_k, num_samples, make_generator(seed))
    value = 0.0
    gradient = np.zeros(s.size)
    for prefix in samples:
        value -= plackett_luce_log_prob(prefix, s, top_k, s.size)
        gradient += _neg_log_prob_gradient(prefix, s)
    return LossResult(value / num_samples, gradient / num_samples)
