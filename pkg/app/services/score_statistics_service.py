import numpy as np

from app.core.exceptions import NoTeacherScoresError
from app.domain.entities.evaluation import ScoreStats
from app.domain.entities.ranking import Dataset


class ScoreStatisticsService:
    """Distribution summaries of teacher scores."""

    def teacher_score_stats(self, ds: Dataset) -> ScoreStats:
        """Pool every teacher score; linear-interpolation percentiles, population std."""
        pooled = [rl.teacher_scores for rl in ds if rl.teacher_scores is not None]
        if not pooled:
            raise NoTeacherScoresError(f"dataset {ds.name or '<unnamed>'} carries no teacher scores")
        values = np.concatenate(pooled)
        p25, p50, p75 = np.percentile(values, [25, 50, 75])
        return ScoreStats(
            mean=float(values.mean()),
            std=float(values.std()),
            min=float(values.min()),
            p25=float(p25),
            p50=float(p50),
            p75=float(p75),
            max=float(values.max()),
            count=int(values.size),
        )
