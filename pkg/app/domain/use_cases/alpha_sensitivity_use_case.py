import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence

from app.domain.entities.ranking import Dataset
from app.domain.student import train
from app.schemas.distill import DistillConfig, DistillLoss
from app.schemas.metrics import EmptyQueryPolicy, MetricSpec
from app.services.evaluation_service import EvaluationService

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AlphaPoint:
    method: str
    alpha: float
    value: float


class AlphaSensitivityUseCase:
    """Validation metric of each loss as the relevance weight alpha varies."""

    def __init__(self, evaluation_service: Optional[EvaluationService] = None):
        self._evaluation_service = evaluation_service or EvaluationService()

    def alpha_sensitivity(
        self,
        ds_train: Dataset,
        ds_val: Dataset,
        losses: Sequence[DistillLoss],
        alphas: Sequence[float],
        base_cfg: DistillConfig,
        metric: str = "MRR@10",
        binarize_threshold: Optional[float] = None,
    ) -> List[AlphaPoint]:
        """One training run per (loss, alpha), scored on the validation split."""
        spec = MetricSpec.parse(
            metric, empty_query_policy=EmptyQueryPolicy.IGNORE, binarize_threshold=binarize_threshold
        )
        points = []
        for loss in losses:
            for alpha in alphas:
                cfg = base_cfg.model_copy(update={"distill_loss": loss, "alpha": float(alpha)})
                run = train(ds_train, ds_val, cfg)
                report = self._evaluation_service.evaluate_model(run.best_model, ds_val, [spec])[spec.name]
                points.append(AlphaPoint(loss.display_name, float(alpha), report.aggregate))
                logger.info(f"{loss.display_name} alpha={alpha}: {spec.name} {report.aggregate:.3f}")
        return points
