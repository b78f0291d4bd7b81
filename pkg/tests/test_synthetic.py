import numpy as np
import pytest
from scipy.stats import spearmanr

from app.core.exceptions import SyntheticDataError
from app.domain.validation import validate_dataset
from app.services.synthetic_data_service import MAX_GRADE, grade_labels, standardize, synthetic_utility
from conftest import make_synthetic


def test_synthetic_dataset_shape():
    """Test list lengths, feature width and ids."""
    ds = make_synthetic(30, seed=1, list_len=(5, 9), feature_dim=6)
    assert len(ds) == 30
    assert ds.feature_dim == 6
    assert all(5 <= rl.size <= 9 for rl in ds)
    assert ds.query_ids[:2] == ("0", "1")
    assert ds.lists[0].doc_ids[0] == "0"
    assert validate_dataset(ds) == []


def test_synthetic_is_seed_deterministic():
    """Test the same seed gives identical data and another seed does not."""
    a = make_synthetic(10, seed=42)
    b = make_synthetic(10, seed=42)
    c = make_synthetic(10, seed=43)
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x.features, y.features)
        np.testing.assert_array_equal(x.relevance, y.relevance)
        np.testing.assert_array_equal(x.teacher_scores, y.teacher_scores)
    assert not np.array_equal(a.lists[0].features, c.lists[0].features)


def test_label_grades_and_sparsity():
    """Test labels are graded 0..4 with roughly the requested share of positives."""
    ds = make_synthetic(200, seed=3, list_len=(20, 20), label_sparsity=0.1)
    labels = np.concatenate([rl.relevance for rl in ds])
    assert set(np.unique(labels)) <= set(range(MAX_GRADE + 1))
    assert np.mean(labels > 0) == pytest.approx(0.1, abs=0.01)
    assert {1.0, 2.0, 3.0, 4.0} <= set(np.unique(labels))


def test_labels_follow_utility():
    """Test higher grades go to higher utilities."""
    utility = np.linspace(-1, 1, 100)
    grades = grade_labels(utility, 0.2)
    assert np.all(np.diff(grades) >= 0)
    assert grades[0] == 0 and grades[-1] == MAX_GRADE


def test_utility_has_an_interaction_term():
    """Test the fixed ground truth on a hand-computed row."""
    x = np.array([[2.0, 3.0, 4.0]])
    assert synthetic_utility(x)[0] == pytest.approx(2.0 + 1.5 + 4.0 / 3.0 + 6.0)


def test_teacher_quality_controls_fidelity():
    """Test a better teacher agrees more with the ground truth."""
    def agreement(quality):
        ds = make_synthetic(50, seed=9, teacher_quality=quality)
        teacher = np.concatenate([rl.teacher_scores for rl in ds])
        utility = np.concatenate([synthetic_utility(rl.features) for rl in ds])
        return spearmanr(teacher, utility)[0]

    assert agreement(1.0) == pytest.approx(1.0)
    assert agreement(0.9) > agreement(0.3) > agreement(0.0)


@pytest.mark.parametrize("kwargs", [
    {"n_queries": 0},
    {"list_len": (5, 2)},
    {"feature_dim": 1},
    {"teacher_quality": 1.5},
    {"label_sparsity": 0.0},
    {"label_noise": -0.5},
])
def test_invalid_parameters(kwargs):
    """Test invalid generation parameters are rejected."""
    params = {"n_queries": 5, "seed": 0}
    params.update(kwargs)
    with pytest.raises(SyntheticDataError):
        make_synthetic(**params)


def test_noiseless_labels_grade_the_utility():
    """Test label_noise 0 grades the standardized utility itself."""
    ds = make_synthetic(40, seed=5, list_len=(10, 10), label_noise=0.0)
    features = np.concatenate([rl.features for rl in ds])
    labels = np.concatenate([rl.relevance for rl in ds])
    expected = grade_labels(standardize(synthetic_utility(features)), 0.2)
    np.testing.assert_array_equal(labels, expected)


def test_label_noise_only_changes_labels():
    """Test judgment noise leaves features and teacher scores untouched."""
    clean = make_synthetic(30, seed=8, label_noise=0.0)
    noisy = make_synthetic(30, seed=8, label_noise=1.0)
    for a, b in zip(clean, noisy):
        np.testing.assert_array_equal(a.features, b.features)
        np.testing.assert_array_equal(a.teacher_scores, b.teacher_scores)
    clean_labels = np.concatenate([rl.relevance for rl in clean])
    noisy_labels = np.concatenate([rl.relevance for rl in noisy])
    assert not np.array_equal(clean_labels, noisy_labels)
    assert np.mean(noisy_labels > 0) == pytest.approx(np.mean(clean_labels > 0), abs=0.02)


def test_label_noise_lowers_agreement_with_utility():
    """Test noisier judgments agree less with the ground truth."""
    def agreement(noise):
        ds = make_synthetic(100, seed=4, list_len=(20, 20), label_noise=noise)
        labels = np.concatenate([rl.relevance for rl in ds])
        utility = np.concatenate([synthetic_utility(rl.features) for rl in ds])
        return spearmanr(labels, utility)[0]

    assert agreement(0.0) > agreement(1.0) > agreement(3.0)
