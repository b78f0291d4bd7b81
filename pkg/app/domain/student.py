import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from app.core.exceptions import (
    DimensionMismatchError,
    EmptyDatasetError,
    IncompatibleConfigurationError,
    MissingLabelsError,
    TrainingDivergedError,
)
from app.core.seeding import derive_seed, make_generator
from app.domain.entities.ranking import Dataset, RankList
from app.domain.entities.student import LinearModel, TrainingRun, TrainTrace
from app.domain.metrics import GAIN_IDENTITY, ndcg_at_k
from app.domain.objective import (
    TransformSpec,
    combined_loss,
    distill_loss_fn,
    distillation_labels,
    effective_transform,
    relevance_loss_fn,
)
from app.schemas.distill import DistillConfig, DistillLoss

logger = logging.getLogger(__name__)

ADAGRAD_EPSILON = 1e-7
SELECTION_CUTOFF = 5

_STOCHASTIC_LOSSES = (DistillLoss.GUMBEL_NDCG, DistillLoss.RANKDISTIL)


def score(model: LinearModel, rl: RankList) -> np.ndarray:
    """s_i = w·x_i + b for every document of the list."""
    if rl.features is None:
        raise DimensionMismatchError(f"query {rl.query_id} has no features to score")
    if rl.features.shape[1] != model.feature_dim:
        raise DimensionMismatchError(
            f"query {rl.query_id} has {rl.features.shape[1]} features, model expects {model.feature_dim}"
        )
    return rl.features @ model.weights + model.bias


def adagrad_step(model: LinearModel, gradient, learning_rate: float) -> LinearModel:
    """One Adagrad update over the weights and the bias."""
    g = np.asarray(gradient, dtype=np.float64).ravel()
    if g.size != model.feature_dim + 1:
        raise DimensionMismatchError(f"gradient has {g.size} entries, model has {model.feature_dim + 1} parameters")
    if not np.all(np.isfinite(g)):
        raise TrainingDivergedError("non-finite gradient")
    accum = model.adagrad_accum + g * g
    params = model.parameters - learning_rate * g / (np.sqrt(accum) + ADAGRAD_EPSILON)
    return model.with_parameters(params, accum)


class BatchCycle:
    """Shuffle-and-cycle sampler over list indices."""

    def __init__(self, size: int, rng: np.random.Generator):
        self._size = size
        self._rng = rng
        self._order = rng.permutation(size)
        self._pos = 0

    def take(self, count: int) -> np.ndarray:
        picked = []
        while count > 0:
            if self._pos == self._size:
                self._order = self._rng.permutation(self._size)
                self._pos = 0
            chunk = self._order[self._pos:self._pos + count]
            picked.append(chunk)
            self._pos += chunk.size
            count -= chunk.size
        return np.concatenate(picked)


@dataclass(frozen=True)
class _TrainList:
    features: np.ndarray
    relevance: Optional[np.ndarray]
    teacher_labels: Optional[np.ndarray]


@dataclass(frozen=True)
class _ValList:
    rank_list: RankList
    relevance: Optional[np.ndarray]
    teacher_gains: Optional[np.ndarray]


def _prepare_train(ds: Dataset, cfg: DistillConfig) -> List[_TrainList]:
    # only the label vectors the objective weights are read
    transform = TransformSpec(effective_transform(cfg.distill_loss, cfg.transform_on), cfg.temperature)
    prepared = []
    for rl in ds:
        if rl.features is None:
            raise DimensionMismatchError(f"query {rl.query_id} has no features")
        relevance = None
        teacher = None
        if cfg.alpha > 0:
            relevance = rl.relevance
            if relevance is None:
                raise MissingLabelsError(f"query {rl.query_id} has no relevance labels but alpha={cfg.alpha}")
        if cfg.alpha < 1:
            raw = rl.teacher_scores
            if raw is None:
                raise MissingLabelsError(f"query {rl.query_id} has no teacher scores but alpha={cfg.alpha}")
            teacher = distillation_labels(raw, cfg.distill_loss, transform)
        prepared.append(_TrainList(rl.features, relevance, teacher))
    return prepared


def prepare_validation(ds: Dataset) -> List[_ValList]:
    prepared = []
    for rl in ds:
        gains = None
        if rl.teacher_scores is not None:
            gains = rl.teacher_scores - rl.teacher_scores.min()
        prepared.append(_ValList(rl, rl.relevance, gains))
    return prepared


def _mean_ndcg(values: List[float]) -> float:
    return 100.0 * float(np.mean(values)) if values else float("nan")


def validation_metrics(model: LinearModel, val: List[_ValList]) -> tuple:
    """NDCG@5 ×100 of the model against relevance labels and against teacher scores."""
    vs_relevance = []
    vs_teacher = []
    for item in val:
        s = score(model, item.rank_list)
        if item.relevance is not None and np.any(item.relevance > 0):
            vs_relevance.append(ndcg_at_k(item.relevance, s, SELECTION_CUTOFF))
        if item.teacher_gains is not None and np.any(item.teacher_gains > 0):
            vs_teacher.append(ndcg_at_k(item.teacher_gains, s, SELECTION_CUTOFF, gain=GAIN_IDENTITY))
    return _mean_ndcg(vs_relevance), _mean_ndcg(vs_teacher)


def check_top_k(ds: Dataset, cfg: DistillConfig) -> None:
    if cfg.alpha < 1 and cfg.distill_loss.uses_top_k and cfg.top_k > ds.max_list_length:
        raise IncompatibleConfigurationError(
            f"top_k={cfg.top_k} exceeds the longest training list ({ds.max_list_length})"
        )


def train(ds_train: Dataset, ds_val: Dataset, cfg: DistillConfig) -> TrainingRun:
    """Fit a linear student with mini-batch Adagrad on the combined objective."""
    if len(ds_train) == 0:
        raise EmptyDatasetError("training dataset has no lists")
    if ds_train.feature_dim < 1:
        raise DimensionMismatchError("training dataset has no features")
    check_top_k(ds_train, cfg)

    lists = _prepare_train(ds_train, cfg)
    val = prepare_validation(ds_val)
    use_val_relevance = ds_val.has_relevance()

    rel_fn = relevance_loss_fn(cfg.relevance_loss)
    stochastic = cfg.distill_loss in _STOCHASTIC_LOSSES
    shared_distill_fn = None if stochastic else distill_loss_fn(cfg)

    model = LinearModel.zeros(ds_train.feature_dim)
    cycle = BatchCycle(len(lists), make_generator(cfg.seed, "batching"))
    eval_every = cfg.resolved_eval_every()

    traces: List[TrainTrace] = []
    best_model, best_step, best_value = None, 0, -np.inf
    window: List[float] = []

    logger.info(
        f"Training {cfg.method_name} alpha={cfg.alpha} lr={cfg.learning_rate} "
        f"for {cfg.train_steps} steps on {len(lists)} lists"
    )
    for step in range(1, cfg.train_steps + 1):
        batch = cycle.take(cfg.batch_lists)
        features = [lists[i].features for i in batch]
        offsets = np.cumsum([f.shape[0] for f in features])[:-1]
        stacked = np.concatenate(features)
        batch_scores = np.split(stacked @ model.weights + model.bias, offsets)

        total = 0.0
        score_grads = []
        for position, (i, s) in enumerate(zip(batch, batch_scores)):
            item = lists[i]
            distill_fn = shared_distill_fn
            if stochastic and cfg.alpha < 1:
                distill_fn = distill_loss_fn(cfg, derive_seed(cfg.seed, "loss", step, position))
            result = combined_loss(item.relevance, item.teacher_labels, s, cfg.alpha, rel_fn, distill_fn)
            total += result.value
            score_grads.append(result.gradient)

        loss = total / len(batch)
        if not np.isfinite(loss):
            raise TrainingDivergedError(f"non-finite loss at step {step}")
        score_grad = np.concatenate(score_grads)
        gradient = np.append(stacked.T @ score_grad, score_grad.sum()) / len(batch)
        model = adagrad_step(model, gradient, cfg.learning_rate)
        window.append(loss)

        if step % eval_every == 0 or step == cfg.train_steps:
            vs_relevance, vs_teacher = validation_metrics(model, val)
            traces.append(TrainTrace(step, float(np.mean(window)), vs_relevance, vs_teacher))
            window = []
            selected = vs_relevance if use_val_relevance else vs_teacher
            logger.debug(f"step {step}: loss={traces[-1].train_loss:.6f} ndcg5 rel={vs_relevance:.3f} teacher={vs_teacher:.3f}")
            if np.isfinite(selected) and selected > best_value:
                best_model, best_step, best_value = model, step, selected

    if best_model is None:
        best_model, best_step = model, cfg.train_steps
    logger.info(f"Finished {cfg.method_name}: best step {best_step}")
    return TrainingRun(final_model=model, best_model=best_model, best_step=best_step, traces=traces)
