from dataclasses import dataclass
from typing import Tuple

import numpy as np

from app.core.exceptions import InvalidLabelsError, LengthMismatchError, UndefinedIdealDCGError


@dataclass(frozen=True)
class LossResult:
    """Loss value and its gradient with respect to the scores."""
    value: float
    gradient: np.ndarray

    @classmethod
    def zero(cls, n: int) -> "LossResult":
        return cls(0.0, np.zeros(n))

    def scaled(self, weight: float) -> "LossResult":
        return LossResult(weight * self.value, weight * self.gradient)

    def __add__(self, other: "LossResult") -> "LossResult":
        return LossResult(self.value + other.value, self.gradient + other.gradient)


@dataclass(frozen=True)
class NoiseSpec:
    """Gumbel perturbation and rank smoothing for the GumbelNDCG loss."""
    num_samples: int = 8
    gumbel_scale: float = 1.0
    smoothing_tau: float = 0.1
    seed: int = 0
    disabled: bool = False

    def __post_init__(self):
        if self.num_samples < 1:
            raise ValueError("num_samples must be positive")
        if self.gumbel_scale <= 0 or self.smoothing_tau <= 0:
            raise ValueError("gumbel_scale and smoothing_tau must be positive")

    @classmethod
    def deterministic(cls, smoothing_tau: float = 0.1) -> "NoiseSpec":
        """Noise switched off: one pass over the unperturbed scores."""
        return cls(num_samples=1, smoothing_tau=smoothing_tau, disabled=True)


def as_pair(labels, scores) -> Tuple[np.ndarray, np.ndarray]:
    y = np.asarray(labels, dtype=np.float64).ravel()
    s = np.asarray(scores, dtype=np.float64).ravel()
    if y.shape != s.shape:
        raise LengthMismatchError(f"labels have {y.size} entries, scores have {s.size}")
    if s.size < 1:
        raise LengthMismatchError("empty score vector")
    return y, s


def all_equal(values: np.ndarray) -> bool:
    return bool(np.all(values == values[0]))


def descending_ranks(scores: np.ndarray) -> np.ndarray:
    """1-based ranks by descending score; ties go to the lower index."""
    order = np.argsort(-scores, kind="stable")
    ranks = np.empty(scores.size, dtype=np.int64)
    ranks[order] = np.arange(1, scores.size + 1)
    return ranks


def ideal_dcg(labels: np.ndarray) -> float:
    gains = np.sort(np.exp2(labels) - 1.0)[::-1]
    discounts = 1.0 / np.log2(np.arange(2, labels.size + 2))
    return float(np.sum(gains * discounts))


def require_dcg_labels(labels: np.ndarray) -> float:
    """Check gains are usable and return the ideal DCG."""
    if np.any(labels < 0):
        raise InvalidLabelsError("DCG-based losses need nonnegative labels")
    if not np.any(labels > 0):
        raise UndefinedIdealDCGError("all labels are zero, ideal DCG is undefined")
    return ideal_dcg(labels)


def has_dcg_signal(labels: np.ndarray) -> bool:
    return bool(np.all(labels >= 0) and np.any(labels > 0))
