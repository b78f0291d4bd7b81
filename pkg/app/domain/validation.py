from dataclasses import dataclass
from typing import List

import numpy as np

from app.core.exceptions import IncompatibleConfigurationError
from app.domain.entities.ranking import Dataset, RankList
from app.schemas.distill import DistillConfig, DistillLoss, TaskKind


@dataclass(frozen=True)
class Violation:
    """A dataset invariant that does not hold."""
    query_id: str
    field: str
    message: str

    def __str__(self) -> str:
        return f"[{self.query_id}] {self.field}: {self.message}"


def _list_violations(rl: RankList, feature_dim: int) -> List[Violation]:
    violations = []
    qid = rl.query_id
    n = rl.size

    if n < 1:
        violations.append(Violation(qid, "doc_ids", "list is empty"))
    if len(set(rl.doc_ids)) != n:
        seen, duplicates = set(), []
        for doc_id in rl.doc_ids:
            if doc_id in seen and doc_id not in duplicates:
                duplicates.append(doc_id)
            seen.add(doc_id)
        violations.append(Violation(qid, "doc_ids", f"duplicate doc ids: {', '.join(duplicates)}"))

    for name in ("relevance", "teacher_scores"):
        values = getattr(rl, name)
        if values is not None and values.shape != (n,):
            violations.append(Violation(qid, name, f"expected {n} values, got {values.size}"))

    if rl.features is not None:
        rows, cols = rl.features.shape
        if rows != n:
            violations.append(Violation(qid, "features", f"expected {n} rows, got {rows}"))
        if cols != feature_dim:
            violations.append(Violation(qid, "features", f"expected {feature_dim} columns, got {cols}"))

    if rl.relevance is None and rl.teacher_scores is None:
        violations.append(Violation(qid, "labels", "neither relevance nor teacher scores present"))

    if rl.relevance is not None:
        if not np.all(np.isfinite(rl.relevance)):
            violations.append(Violation(qid, "relevance", "non-finite relevance label"))
        elif np.any(rl.relevance < 0):
            violations.append(Violation(qid, "relevance", "negative relevance label"))

    return violations


def validate_dataset(ds: Dataset) -> List[Violation]:
    """Return every invariant violation in the dataset; empty when valid."""
    violations: List[Violation] = []
    seen = set()
    for rl in ds.lists:
        if rl.query_id in seen:
            violations.append(Violation(rl.query_id, "query_id", "duplicate query id"))
        seen.add(rl.query_id)
        violations.extend(_list_violations(rl, ds.feature_dim))
    return violations


def derive_task_constraints(kind: TaskKind, cfg: DistillConfig) -> DistillConfig:
    """Adjust a configuration to what the task allows.

    The zeroshot transfer task has no target-domain relevance labels, so the
    objective is distillation only (alpha = 0). RD needs relevance labels and
    is rejected there; so is a configuration without a distillation loss.
    """
    if kind != TaskKind.T3_TRANSFER_ZEROSHOT:
        return cfg
    if cfg.distill_loss == DistillLoss.RD:
        raise IncompatibleConfigurationError("RD is not applicable to the zeroshot transfer task")
    if cfg.distill_loss == DistillLoss.NONE:
        raise IncompatibleConfigurationError("the zeroshot transfer task needs a distillation loss")
    if cfg.alpha == 0.0:
        return cfg
    return cfg.model_copy(update={"alpha": 0.0})
