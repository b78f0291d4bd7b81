import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import ttest_rel

from app.core.exceptions import SignificanceTestError

SIGNIFICANCE_LEVEL = 0.01


@dataclass(frozen=True)
class TTestResult:
    t: float
    p: float
    significant_at_001: bool
    n: int


def paired_ttest(per_query_a, per_query_b) -> TTestResult:
    """Two-tailed paired Student's t-test over per-query metric values."""
    a = np.asarray(per_query_a, dtype=np.float64).ravel()
    b = np.asarray(per_query_b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise SignificanceTestError(f"vectors are not paired: {a.size} vs {b.size} values")
    if a.size < 2:
        raise SignificanceTestError("paired t-test needs at least 2 queries")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise SignificanceTestError("per-query values must be finite")

    differences = a - b
    if np.ptp(differences) == 0.0:
        mean = float(differences[0])
        if mean == 0.0:
            return TTestResult(0.0, 1.0, False, a.size)
        return TTestResult(math.copysign(math.inf, mean), 0.0, True, a.size)

    result = ttest_rel(a, b)
    p = float(result.pvalue)
    return TTestResult(float(result.statistic), p, p < SIGNIFICANCE_LEVEL, a.size)
