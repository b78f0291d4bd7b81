import math

import numpy as np
import pytest
from scipy.stats import ttest_rel

from app.core.exceptions import SignificanceTestError
from app.domain.significance import paired_ttest


def test_matches_scipy(rng):
    """Test the statistic and p-value of a regular paired sample."""
    a = rng.random(30)
    b = a - 0.05 + rng.normal(scale=0.02, size=30)
    result = paired_ttest(a, b)
    expected = ttest_rel(a, b)
    assert result.t == pytest.approx(expected.statistic)
    assert result.p == pytest.approx(expected.pvalue)
    assert result.n == 30
    assert result.significant_at_001 == (expected.pvalue < 0.01)


def test_clear_improvement_is_significant():
    """Test a consistent improvement is significant at 0.01."""
    a = np.linspace(0.5, 0.9, 40)
    b = a - 0.1 + 0.01 * np.sin(np.arange(40))
    result = paired_ttest(a, b)
    assert result.t > 0
    assert result.significant_at_001


def test_identical_vectors():
    """Test equal vectors give no evidence of a difference."""
    a = [0.3, 0.5, 0.9]
    result = paired_ttest(a, a)
    assert (result.t, result.p, result.significant_at_001) == (0.0, 1.0, False)


def test_constant_nonzero_difference():
    """Test a constant shift gives an infinite statistic."""
    result = paired_ttest([0.5, 0.75, 1.0], [0.25, 0.5, 0.75])
    assert math.isinf(result.t) and result.t > 0
    assert result.p == 0.0
    assert result.significant_at_001


@pytest.mark.parametrize("a,b", [
    ([0.1, 0.2], [0.1]),
    ([0.1], [0.2]),
    ([0.1, float("nan")], [0.2, 0.3]),
])
def test_invalid_inputs(a, b):
    """Test unpaired, too short and non-finite vectors."""
    with pytest.raises(SignificanceTestError):
        paired_ttest(a, b)


def test_false_positive_rate_under_the_null():
    """Test about 1% of paired samples with no real difference are called significant."""
    rng = np.random.default_rng(99)
    trials = 5000
    rejected = 0
    for _ in range(trials):
        base = rng.normal(size=50)
        a = base + rng.normal(size=50)
        b = base + rng.normal(size=50)
        rejected += paired_ttest(a, b).significant_at_001
    assert rejected / trials == pytest.approx(0.01, abs=0.007)
