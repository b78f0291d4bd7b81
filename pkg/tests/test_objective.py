import math

import numpy as np
import pytest

from app.core.exceptions import MissingLabelsError, NonFiniteScoresError
from app.domain.losses import loss_lambda, loss_mse, loss_softmax
from app.domain.objective import (
    TransformSpec,
    combined_loss,
    distill_loss_fn,
    distillation_labels,
    effective_transform,
    relevance_loss_fn,
    transform_teacher_scores,
)
from app.schemas.distill import DistillConfig, DistillLoss, RelevanceLoss


def test_transform_is_softmax_with_temperature():
    """Test the enabled transform against a hand evaluation."""
    out = transform_teacher_scores([0.0, math.log(3.0)], TransformSpec(enabled=True, temperature=1.0))
    np.testing.assert_allclose(out, [0.25, 0.75])

    out = transform_teacher_scores([0.0, 2.0 * math.log(3.0)], TransformSpec(enabled=True, temperature=2.0))
    np.testing.assert_allclose(out, [0.25, 0.75])


def test_transform_preserves_order_and_sums_to_one(rng):
    """Test transformed scores form an order-preserving simplex vector."""
    for temperature in (0.1, 1.0, 10.0):
        t = rng.normal(size=12) * 3
        out = transform_teacher_scores(t, TransformSpec(temperature=temperature))
        assert out.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(out >= 0)
        np.testing.assert_array_equal(np.argsort(-t, kind="stable"), np.argsort(-out, kind="stable"))


def test_disabled_transform_returns_raw_scores():
    """Test the disabled transform is the identity."""
    t = np.array([3.2, -1.0, 0.5])
    np.testing.assert_array_equal(transform_teacher_scores(t, TransformSpec(enabled=False)), t)


def test_transform_rejects_bad_input():
    """Test non-finite scores, empty lists and a zero temperature."""
    with pytest.raises(NonFiniteScoresError):
        transform_teacher_scores([1.0, float("nan")], TransformSpec())
    with pytest.raises(ValueError):
        transform_teacher_scores([], TransformSpec())
    with pytest.raises(ValueError):
        TransformSpec(temperature=0.0)


def test_rankdistil_forces_transform():
    """Test RankDistil always samples from transformed scores."""
    assert effective_transform(DistillLoss.RANKDISTIL, False) is True
    assert effective_transform(DistillLoss.MSE, False) is False
    assert effective_transform(DistillLoss.MSE, True) is True


def test_gain_losses_shift_untransformed_teacher_scores():
    """Test DCG-based losses see nonnegative gains when the transform is off."""
    t = [-2.0, 0.5, -1.0]
    off = TransformSpec(enabled=False)
    for loss in (DistillLoss.LAMBDA, DistillLoss.GUMBEL_NDCG):
        np.testing.assert_allclose(distillation_labels(t, loss, off), [0.0, 2.5, 1.0])
    np.testing.assert_array_equal(distillation_labels(t, DistillLoss.MSE, off), t)
    on = TransformSpec()
    np.testing.assert_array_equal(distillation_labels(t, DistillLoss.LAMBDA, on), transform_teacher_scores(t, on))

    lambda_fn = distill_loss_fn(DistillConfig(distill_loss=DistillLoss.LAMBDA, transform_on=False))
    assert np.any(lambda_fn(distillation_labels(t, DistillLoss.LAMBDA, off), np.zeros(3)).gradient != 0.0)



def test_combined_loss_endpoints():
    """Test alpha 1 and alpha 0 reduce to a single term."""
    y = np.array([1.0, 0.0, 2.0])
    yt = np.array([0.2, 0.5, 0.3])
    s = np.array([0.1, -0.3, 0.7])

    rel_only = combined_loss(y, None, s, 1.0, loss_softmax, None)
    assert rel_only.value == loss_softmax(y, s).value

    distill_only = combined_loss(None, yt, s, 0.0, loss_softmax, loss_mse)
    assert distill_only.value == loss_mse(yt, s).value


def test_combined_loss_mixes_terms():
    """Test the weighted sum of both terms and its gradient."""
    y = np.array([1.0, 0.0, 2.0])
    yt = np.array([0.2, 0.5, 0.3])
    s = np.array([0.1, -0.3, 0.7])
    result = combined_loss(y, yt, s, 0.25, loss_softmax, loss_mse)
    assert result.value == pytest.approx(0.25 * loss_softmax(y, s).value + 0.75 * loss_mse(yt, s).value)
    np.testing.assert_allclose(
        result.gradient, 0.25 * loss_softmax(y, s).gradient + 0.75 * loss_mse(yt, s).gradient
    )


def test_combined_loss_missing_labels():
    """Test a weighted term without labels is an error."""
    s = np.zeros(3)
    with pytest.raises(MissingLabelsError):
        combined_loss(None, np.ones(3) / 3, s, 0.5, loss_softmax, loss_mse)
    with pytest.raises(MissingLabelsError):
        combined_loss(np.ones(3), None, s, 0.5, loss_softmax, loss_mse)
    with pytest.raises(ValueError):
        combined_loss(np.ones(3), None, s, 1.5, loss_softmax, None)


def test_relevance_lambda_is_guarded():
    """Test a relevance list without positives contributes nothing to LambdaLoss."""
    fn = relevance_loss_fn(RelevanceLoss.LAMBDA)
    result = fn(np.zeros(3), np.array([0.3, 0.1, -0.2]))
    assert result.value == 0.0
    y, s = np.array([1.0, 0.0]), np.array([0.0, 0.0])
    assert fn(y, s).value == loss_lambda(y, s).value


def test_distill_loss_fn_binding():
    """Test each configured loss binds to the right function."""
    assert distill_loss_fn(DistillConfig(distill_loss=DistillLoss.NONE, alpha=1.0)) is None
    assert distill_loss_fn(DistillConfig(distill_loss=DistillLoss.MSE)) is loss_mse

    rd = distill_loss_fn(DistillConfig(distill_loss=DistillLoss.RD, top_k=10))
    # K is clipped to the list length
    assert rd(np.array([0.3, 0.9]), np.zeros(2)).value == pytest.approx(2 * math.log(2))

    rankdistil = distill_loss_fn(DistillConfig(distill_loss=DistillLoss.RANKDISTIL, top_k=2), seed=4)
    probs = np.array([0.5, 0.5])
    assert rankdistil(probs, np.zeros(2)).value == pytest.approx(math.log(2))


def test_stochastic_distill_loss_depends_on_seed(rng):
    """Test GumbelNDCG binds its noise seed."""
    cfg = DistillConfig(distill_loss=DistillLoss.GUMBEL_NDCG)
    y = np.array([0.6, 0.1, 0.3])
    s = rng.normal(size=3)
    assert distill_loss_fn(cfg, seed=1)(y, s).value == distill_loss_fn(cfg, seed=1)(y, s).value
    assert distill_loss_fn(cfg, seed=1)(y, s).value != distill_loss_fn(cfg, seed=2)(y, s).value
