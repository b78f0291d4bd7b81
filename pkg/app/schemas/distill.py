from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class RelevanceLoss(str, Enum):
    SOFTMAX = "softmax"
    LAMBDA = "lambda"


class DistillLoss(str, Enum):
    NONE = "none"
    RD = "rd"
    RANKDISTIL = "rankdistil"
    MSE = "mse"
    PAIR_LOG = "pairlog"
    PAIR_MSE = "pairmse"
    GUMBEL_NDCG = "gumbelndcg"
    SOFTMAX = "softmax"
    LAMBDA = "lambda"

    @property
    def display_name(self) -> str:
        return DISPLAY_NAMES[self]

    @property
    def uses_top_k(self) -> bool:
        return self in (DistillLoss.RD, DistillLoss.RANKDISTIL)

    @property
    def order_only(self) -> bool:
        """Losses that read only the teacher ordering, never its values."""
        return self in (DistillLoss.RD, DistillLoss.PAIR_LOG)

    @property
    def uses_gains(self) -> bool:
        """Losses that read teacher labels as DCG gains, which must be nonnegative."""
        return self in (DistillLoss.LAMBDA, DistillLoss.GUMBEL_NDCG)



DISPLAY_NAMES = {
    DistillLoss.NONE: "Relevance Only",
    DistillLoss.RD: "RD",
    DistillLoss.RANKDISTIL: "RankDistil",
    DistillLoss.MSE: "MSE",
    DistillLoss.PAIR_LOG: "PairLog",
    DistillLoss.PAIR_MSE: "PairMSE",
    DistillLoss.GUMBEL_NDCG: "GumbelNDCG",
    DistillLoss.SOFTMAX: "Softmax",
    DistillLoss.LAMBDA: "LambdaLoss",
}


class TaskKind(str, Enum):
    T1_IN_DOMAIN = "t1"
    T2_TRANSFER = "t2"
    T3_TRANSFER_ZEROSHOT = "t3"
    T4_TABULAR = "t4"


class DistillConfig(BaseModel):
    """Everything one training run needs besides the data."""
    model_config = ConfigDict(frozen=True, use_enum_values=False)

    relevance_loss: RelevanceLoss = Field(default=RelevanceLoss.SOFTMAX, description="l_rel")
    distill_loss: DistillLoss = Field(default=DistillLoss.SOFTMAX, description="l_distill")
    alpha: float = Field(default=0.5, ge=0.0, le=1.0, description="Weight of the relevance term")
    transform_on: bool = Field(default=True, description="Softmax transform of teacher scores")
    temperature: float = Field(default=1.0, gt=0.0, description="Softmax transform temperature")
    top_k: int = Field(default=5, gt=0, description="K for RD and RankDistil")
    num_permutation_samples: int = Field(default=8, gt=0, description="RankDistil permutation samples")
    gumbel_num_samples: int = Field(default=8, gt=0)
    gumbel_scale: float = Field(default=1.0, gt=0.0)
    smoothing_tau: float = Field(default=0.1, gt=0.0)
    learning_rate: float = Field(default=1.0, gt=0.0)
    batch_lists: int = Field(default=128, gt=0)
    train_steps: int = Field(default=2000, ge=0)
    eval_every: Optional[int] = Field(default=None, gt=0)
    seed: int = Field(default=0, ge=-(2 ** 63), lt=2 ** 63)

    @model_validator(mode="after")
    def check_objective(self):
        if self.distill_loss == DistillLoss.NONE and self.alpha != 1.0:
            raise ValueError("distill_loss 'none' requires alpha = 1")
        return self

    @property
    def method_name(self) -> str:
        return self.distill_loss.display_name

    def resolved_eval_every(self) -> int:
        if self.eval_every is not None:
            return self.eval_every
        return max(1, self.train_steps // 20)


class SweepGrid(BaseModel):
    """Hyperparameter grid, defaulting to the published search space."""
    model_config = ConfigDict(frozen=True)

    learning_rates: List[float] = Field(default_factory=lambda: [0.1, 1.0, 10.0], min_length=1)
    alphas: List[float] = Field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0], min_length=1)
    temperatures: List[float] = Field(default_factory=lambda: [0.1, 1.0, 2.0, 5.0, 10.0], min_length=1)
    top_ks: List[int] = Field(default_factory=lambda: [1, 5, 10], min_length=1)
    transform_modes: List[bool] = Field(default_factory=lambda: [True, False], min_length=1)
    losses: List[DistillLoss] = Field(default_factory=lambda: list(DistillLoss), min_length=1)

    @field_validator("learning_rates", "temperatures")
    @classmethod
    def validate_positive(cls, v):
        if any(x <= 0 for x in v):
            raise ValueError("values must be positive")
        return v

    @field_validator("alphas")
    @classmethod
    def validate_alphas(cls, v):
        if any(not 0.0 <= a <= 1.0 for a in v):
            raise ValueError("alphas must lie in [0, 1]")
        return v

    @field_validator("top_ks")
    @classmethod
    def validate_top_ks(cls, v):
        if any(k < 1 for k in v):
            raise ValueError("top_ks must be positive")
        return v
