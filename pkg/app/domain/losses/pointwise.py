import numpy as np
from scipy.special import expit

from app.core.exceptions import InvalidPermutationError
from app.domain.losses.base import LossResult, as_pair


def loss_mse(labels, scores) -> LossResult:
    """Sum of squared errors between scores and labels."""
    y, s = as_pair(labels, scores)
    diff = s - y
    return LossResult(float(np.sum(diff ** 2)), 2.0 * diff)


def check_permutation(order, n: int) -> np.ndarray:
    order = np.asarray(order, dtype=np.int64).ravel()
    if order.size != n or not np.array_equal(np.sort(order), np.arange(n)):
        raise InvalidPermutationError(f"not a permutation of {n} indices: {order.tolist()}")
    return order


def teacher_ordering(teacher_scores) -> np.ndarray:
    """Document indices sorted by descending teacher score, ties by index."""
    return np.argsort(-np.asarray(teacher_scores, dtype=np.float64), kind="stable")


def loss_rd(teacher_order, scores, top_k: int) -> LossResult:
    """Sigmoid cross-entropy treating the teacher's top K as positives.

    No negatives are used: documents below the cutoff get zero gradient.
    """
    s = np.asarray(scores, dtype=np.float64).ravel()
    n = s.size
    if not 1 <= top_k <= n:
        raise InvalidPermutationError(f"top_k={top_k} outside [1, {n}]")
    order = check_permutation(teacher_order, n)
    top = order[:top_k]
    # -ln(sigmoid(s)) == logaddexp(0, -s)
    value = float(np.sum(np.logaddexp(0.0, -s[top])))
    gradient = np.zeros(n)
    gradient[top] = -expit(-s[top])
    return LossResult(value, gradient)
