import numpy as np
from scipy.special import expit

from app.domain.losses.base import LossResult, all_equal, as_pair, descending_ranks, require_dcg_labels


def _weighted_logistic(weights: np.ndarray, s: np.ndarray) -> LossResult:
    """sum_ij w_ij * -ln(sigmoid(s_i - s_j)) with its score gradient."""
    diff = s[:, None] - s[None, :]
    value = float(np.sum(weights * np.logaddexp(0.0, -diff)))
    lambdas = weights * expit(-diff)
    gradient = lambdas.sum(axis=0) - lambdas.sum(axis=1)
    return LossResult(value, gradient)


def loss_pair_logistic(labels, scores) -> LossResult:
    """RankNet pairwise logistic loss over every ordered pair with y_i > y_j."""
    y, s = as_pair(labels, scores)
    if all_equal(y):
        return LossResult.zero(s.size)
    preferred = (y[:, None] > y[None, :]).astype(np.float64)
    return _weighted_logistic(preferred, s)


def loss_pair_mse(labels, scores) -> LossResult:
    """Squared error between score differences and label differences.

    The sum runs over ordered pairs, so each unordered pair counts twice.
    """
    y, s = as_pair(labels, scores)
    errors = (s[:, None] - s[None, :]) - (y[:, None] - y[None, :])
    return LossResult(float(np.sum(errors ** 2)), 4.0 * errors.sum(axis=1))


def lambda_weights(y: np.ndarray, s: np.ndarray) -> np.ndarray:
    """NDCG swap deltas between each pair, normalised by the ideal DCG."""
    idcg = require_dcg_labels(y)
    gains = np.exp2(y)
    discounts = 1.0 / np.log2(1.0 + descending_ranks(s))
    return np.abs(gains[:, None] - gains[None, :]) * np.abs(discounts[:, None] - discounts[None, :]) / idcg


def loss_lambda(labels, scores) -> LossResult:
    """LambdaLoss: pairwise logistic loss weighted by NDCG deltas.

    The weights depend on the current ranks but are held constant when
    differentiating.
    """
    y, s = as_pair(labels, scores)
    deltas = lambda_weights(y, s)
    if all_equal(y):
        return LossResult.zero(s.size)
    preferred = y[:, None] > y[None, :]
    return _weighted_logistic(np.where(preferred, deltas, 0.0), s)
