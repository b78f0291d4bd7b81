from dataclasses import dataclass, field, replace
from typing import List, Optional

import numpy as np


@dataclass(frozen=True)
class LinearModel:
    """Linear student ranker with its Adagrad accumulator."""
    weights: np.ndarray
    bias: float = 0.0
    adagrad_accum: Optional[np.ndarray] = None

    def __post_init__(self):
        weights = np.array(self.weights, dtype=np.float64, ndmin=1)
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "bias", float(self.bias))
        accum = self.adagrad_accum
        accum = np.zeros(weights.size + 1) if accum is None else np.array(accum, dtype=np.float64, ndmin=1)
        accum.setflags(write=False)
        object.__setattr__(self, "adagrad_accum", accum)

    @classmethod
    def zeros(cls, feature_dim: int) -> "LinearModel":
        return cls(weights=np.zeros(feature_dim))

    @property
    def feature_dim(self) -> int:
        return int(self.weights.size)

    @property
    def parameters(self) -> np.ndarray:
        """Weights followed by the bias, in the order gradients are laid out."""
        return np.append(self.weights, self.bias)

    def with_parameters(self, parameters: np.ndarray, adagrad_accum: np.ndarray) -> "LinearModel":
        return replace(self, weights=parameters[:-1], bias=parameters[-1], adagrad_accum=adagrad_accum)


@dataclass(frozen=True)
class TrainTrace:
    """Validation snapshot emitted during training."""
    step: int
    train_loss: float
    val_metric_vs_relevance: float
    val_metric_vs_teacher: float


@dataclass
class TrainingRun:
    """Outcome of one training run."""
    final_model: LinearModel
    best_model: LinearModel
    best_step: int
    traces: List[TrainTrace] = field(default_factory=list)

    def __iter__(self):
        # unpacks as (model, traces)
        yield self.final_model
        yield self.traces
