"""Value-and-gradient ranking losses over a single list."""

from app.domain.losses.base import LossResult, NoiseSpec
from app.domain.losses.listwise import loss_gumbel_ndcg, loss_softmax
from app.domain.losses.pairwise import loss_lambda, loss_pair_logistic, loss_pair_mse
from app.domain.losses.plackett_luce import (
    loss_rankdistil,
    plackett_luce_log_prob,
    sample_top_k_permutation,
    sample_top_k_permutations,
)
from app.domain.losses.pointwise import loss_mse, loss_rd, teacher_ordering

__all__ = [
    "LossResult",
    "NoiseSpec",
    "loss_gumbel_ndcg",
    "loss_lambda",
    "loss_mse",
    "loss_pair_logistic",
    "loss_pair_mse",
    "loss_rankdistil",
    "loss_rd",
    "loss_softmax",
    "plackett_luce_log_prob",
    "sample_top_k_permutation",
    "sample_top_k_permutations",
    "teacher_ordering",
]
