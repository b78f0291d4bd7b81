import logging
from typing import Tuple

import numpy as np

from app.core.exceptions import SyntheticDataError
from app.core.seeding import make_generator
from app.domain.entities.ranking import Dataset, RankList

logger = logging.getLogger(__name__)

MAX_GRADE = 4
DEFAULT_LABEL_NOISE = 1.0


def synthetic_utility(features: np.ndarray) -> np.ndarray:
    """Fixed ground truth: sum_j x_j / (j + 1) + x_0 * x_1."""
    weights = 1.0 / np.arange(1, features.shape[1] + 1)
    return features @ weights + features[:, 0] * features[:, 1]


def standardize(values: np.ndarray) -> np.ndarray:
    spread = values.std()
    if spread == 0:
        return np.zeros_like(values)
    return (values - values.mean()) / spread


def grade_labels(utility: np.ndarray, label_sparsity: float) -> np.ndarray:
    """Top `label_sparsity` share of utilities become positives, graded 1..4 by quartile."""
    threshold = np.quantile(utility, 1.0 - label_sparsity)
    positive = utility >= threshold
    edges = np.quantile(utility[positive], [0.25, 0.5, 0.75])
    grades = 1 + np.searchsorted(edges, utility, side="right")
    return np.where(positive, np.minimum(grades, MAX_GRADE), 0).astype(np.float64)


class SyntheticDataService:
    """Generates tabular ranking datasets with a known utility and a tunable teacher.

    Relevance labels grade an assessor's noisy judgment of the standardized utility,
    `label_noise` being the judgment noise in utility standard deviations.
    """

    def generate_synthetic(
        self,
        n_queries: int,
        list_len_range: Tuple[int, int],
        feature_dim: int,
        teacher_quality: float,
        label_sparsity: float,
        seed: int,
        name: str = "synthetic",
        label_noise: float = DEFAULT_LABEL_NOISE,
    ) -> Dataset:
        low, high = list_len_range
        if n_queries < 1:
            raise SyntheticDataError("n_queries must be positive")
        if not 1 <= low <= high:
            raise SyntheticDataError(f"invalid list length range ({low}, {high})")
        if feature_dim < 2:
            raise SyntheticDataError("feature_dim must be at least 2")
        if not 0.0 <= teacher_quality <= 1.0:
            raise SyntheticDataError("teacher_quality must lie in [0, 1]")
        if not 0.0 < label_sparsity <= 1.0:
            raise SyntheticDataError("label_sparsity must lie in (0, 1]")
        if not label_noise >= 0.0:
            raise SyntheticDataError("label_noise must be nonnegative")

        rng = make_generator(seed, "synthetic")
        lengths = rng.integers(low, high + 1, size=n_queries)
        features = rng.standard_normal((int(lengths.sum()), feature_dim))
        noise = rng.standard_normal(features.shape[0])
        judgment_noise = rng.standard_normal(features.shape[0])

        standardized = standardize(synthetic_utility(features))
        labels = grade_labels(standardized + label_noise * judgment_noise, label_sparsity)
        teacher = teacher_quality * standardized + (1.0 - teacher_quality) * noise

        lists = []
        offsets = np.concatenate([[0], np.cumsum(lengths)])
        for q in range(n_queries):
            rows = slice(offsets[q], offsets[q + 1])
            lists.append(RankList(
                query_id=str(q),
                doc_ids=tuple(str(i) for i in range(lengths[q])),
                features=features[rows],
                relevance=labels[rows],
                teacher_scores=teacher[rows],
            ))
        logger.info(f"Generated {n_queries} synthetic queries ({int(lengths.sum())} documents, seed {seed})")
        return Dataset(tuple(lists), feature_dim=feature_dim, name=name)
