import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import softmax

from app.core.exceptions import MissingLabelsError, NonFiniteScoresError
from app.domain.losses import (
    LossResult,
    NoiseSpec,
    loss_gumbel_ndcg,
    loss_lambda,
    loss_mse,
    loss_pair_logistic,
    loss_pair_mse,
    loss_rankdistil,
    loss_rd,
    loss_softmax,
    teacher_ordering,
)
from app.domain.losses.base import has_dcg_signal
from app.schemas.distill import DistillConfig, DistillLoss, RelevanceLoss

logger = logging.getLogger(__name__)

LossFn = Callable[[np.ndarray, np.ndarray], LossResult]


@dataclass(frozen=True)
class TransformSpec:
    """Per-list softmax transform of teacher scores."""
    enabled: bool = True
    temperature: float = 1.0

    def __post_init__(self):
        if not self.temperature > 0:
            raise ValueError("temperature must be positive")


def transform_teacher_scores(teacher_scores, spec: TransformSpec) -> np.ndarray:
    """Map raw teacher scores of one list to distillation labels.

    Enabled: softmax(scores / T), an order-preserving probability vector.
    Disabled: the scores unchanged.
    """
    t = np.asarray(teacher_scores, dtype=np.float64).ravel()
    if t.size < 1:
        raise ValueError("empty teacher score vector")
    if not np.all(np.isfinite(t)):
        raise NonFiniteScoresError("teacher scores must be finite")
    if not spec.enabled:
        return t.copy()
    return softmax(t / spec.temperature)


def effective_transform(loss: DistillLoss, requested: bool) -> bool:
    """RankDistil samples from the transformed scores, so it always needs the transform."""
    if loss == DistillLoss.RANKDISTIL:
        return True
    return requested


def distillation_labels(teacher_scores, loss: DistillLoss, spec: TransformSpec) -> np.ndarray:
    """Teacher labels as the distillation loss consumes them.

    Gain-based losses get untransformed scores shifted so the list minimum is 0.
    """
    labels = transform_teacher_scores(teacher_scores, spec)
    if loss.uses_gains and not spec.enabled:
        labels = labels - labels.min()
    return labels


def _dcg_guarded(fn: LossFn) -> LossFn:
    # lists without a positive (or with a negative) gain carry no DCG signal
    def guarded(labels, scores):
        labels = np.asarray(labels, dtype=np.float64)
        if not has_dcg_signal(labels):
            logger.debug(f"Skipping a list of {labels.size} without DCG signal")
            return LossResult.zero(np.asarray(scores).size)
        return fn(labels, scores)
    return guarded


def relevance_loss_fn(kind: RelevanceLoss) -> LossFn:
    if kind == RelevanceLoss.SOFTMAX:
        return loss_softmax
    return _dcg_guarded(loss_lambda)


def distill_loss_fn(cfg: DistillConfig, seed: int = 0) -> Optional[LossFn]:
    """Bind the configured distillation loss; seed feeds the stochastic ones."""
    kind = cfg.distill_loss
    if kind == DistillLoss.NONE:
        return None
    if kind == DistillLoss.MSE:
        return loss_mse
    if kind == DistillLoss.PAIR_LOG:
        return loss_pair_logistic
    if kind == DistillLoss.PAIR_MSE:
        return loss_pair_mse
    if kind == DistillLoss.SOFTMAX:
        return loss_softmax
    if kind == DistillLoss.LAMBDA:
        return _dcg_guarded(loss_lambda)
    if kind == DistillLoss.GUMBEL_NDCG:
        noise = NoiseSpec(
            num_samples=cfg.gumbel_num_samples,
            gumbel_scale=cfg.gumbel_scale,
            smoothing_tau=cfg.smoothing_tau,
            seed=seed,
        )
        return _dcg_guarded(lambda y, s: loss_gumbel_ndcg(y, s, noise))
    if kind == DistillLoss.RD:
        return lambda y, s: loss_rd(teacher_ordering(y), s, min(cfg.top_k, np.size(s)))
    if kind == DistillLoss.RANKDISTIL:
        return lambda y, s: loss_rankdistil(
            y, s, min(cfg.top_k, np.size(s)), cfg.num_permutation_samples, seed
        )
    raise ValueError(f"Unsupported distillation loss: {kind}")


def combined_loss(
    y: Optional[np.ndarray],
    yt: Optional[np.ndarray],
    s: np.ndarray,
    alpha: float,
    rel_loss: LossFn,
    distill_loss: Optional[LossFn],
) -> LossResult:
    """alpha * l_rel(y, s) + (1 - alpha) * l_distill(yt, s)."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha={alpha} outside [0, 1]")
    if alpha > 0 and y is None:
        raise MissingLabelsError("relevance labels are required when alpha > 0")
    if alpha < 1 and (yt is None or distill_loss is None):
        raise MissingLabelsError("teacher labels and a distillation loss are required when alpha < 1")

    if alpha == 1.0:
        return rel_loss(y, s)
    if alpha == 0.0:
        return distill_loss(yt, s)
    return rel_loss(y, s).scaled(alpha) + distill_loss(yt, s).scaled(1.0 - alpha)
