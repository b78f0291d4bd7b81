import numpy as np
from scipy.special import expit, log_softmax, softmax

from app.core.seeding import make_generator
from app.domain.losses.base import LossResult, NoiseSpec, all_equal, as_pair, require_dcg_labels


def loss_softmax(labels, scores) -> LossResult:
    """Listwise softmax cross-entropy, -sum_i y_i * log softmax_i(s)."""
    y, s = as_pair(labels, scores)
    if all_equal(y):
        return LossResult.zero(s.size)
    value = float(-np.sum(y * log_softmax(s)))
    gradient = y.sum() * softmax(s) - y
    return LossResult(value, gradient)


def _smooth_ndcg(gains: np.ndarray, idcg: float, perturbed: np.ndarray, tau: float) -> LossResult:
    # p[i, j] = sigmoid((s_j - s_i) / tau), the soft indicator that j outranks i
    p = expit((perturbed[None, :] - perturbed[:, None]) / tau)
    np.fill_diagonal(p, 0.0)
    ranks = 1.0 + p.sum(axis=1)
    log_ranks = np.log2(1.0 + ranks)
    value = -float(np.sum(gains / log_ranks)) / idcg

    coef = gains / (idcg * (1.0 + ranks) * np.log(2.0) * log_ranks ** 2)
    slopes = p * (1.0 - p) / tau
    np.fill_diagonal(slopes, 0.0)
    gradient = coef @ slopes - coef * slopes.sum(axis=1)
    return LossResult(value, gradient)


def loss_gumbel_ndcg(labels, scores, noise: NoiseSpec = NoiseSpec()) -> LossResult:
    """Approximate NDCG over Gumbel-perturbed scores, averaged over draws.

    Scores are perturbed first and the smooth ranks are computed on the
    perturbed scores. The same seed reproduces the same noise.
    """
    y, s = as_pair(labels, scores)
    idcg = require_dcg_labels(y)
    if all_equal(y):
        return LossResult.zero(s.size)
    gains = np.exp2(y) - 1.0

    if noise.disabled:
        return _smooth_ndcg(gains, idcg, s, noise.smoothing_tau)

    rng = make_generator(noise.seed)
    draws = rng.gumbel(loc=0.0, scale=noise.gumbel_scale, size=(noise.num_samples, s.size))
    total = LossResult.zero(s.size)
    for g in draws:
        total = total + _smooth_ndcg(gains, idcg, s + g, noise.smoothing_tau)
    return total.scaled(1.0 / noise.num_samples)
