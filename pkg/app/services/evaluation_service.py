import logging
from typing import Dict, Mapping, Sequence

from app.domain.entities.evaluation import EvalReport
from app.domain.entities.ranking import Dataset
from app.domain.entities.student import LinearModel
from app.domain.metrics import dataset_to_qrels, dataset_to_run, evaluate
from app.domain.student import score
from app.infrastructure.formats.trec import parse_qrels, parse_trec_run, qrels_to_mapping, run_to_mapping
from app.schemas.metrics import MetricSpec

logger = logging.getLogger(__name__)


class EvaluationService:
    """Runs a set of metric specs over runs, datasets and students."""

    def evaluate_mappings(self, run: Mapping, qrels: Mapping, specs: Sequence[MetricSpec]) -> Dict[str, EvalReport]:
        return {spec.name: evaluate(run, qrels, spec) for spec in specs}

    def evaluate_trec(
        self, run_text: str, qrel_text: str, specs: Sequence[MetricSpec],
        run_name: str = "run", qrel_name: str = "qrels",
    ) -> Dict[str, EvalReport]:
        """Parse a TREC run and qrels and evaluate them."""
        run = run_to_mapping(parse_trec_run(run_text, run_name))
        qrels = qrels_to_mapping(parse_qrels(qrel_text, qrel_name))
        dropped = sum(1 for q in qrels if q not in run)
        if dropped:
            logger.warning(f"{dropped} judged queries have no run entries")
        return self.evaluate_mappings(run, qrels, specs)

    def evaluate_model(self, model: LinearModel, ds: Dataset, specs: Sequence[MetricSpec]) -> Dict[str, EvalReport]:
        """Score a dataset with a linear student and evaluate against its relevance labels."""
        scores = {rl.query_id: score(model, rl) for rl in ds}
        return self.evaluate_mappings(dataset_to_run(ds, scores), dataset_to_qrels(ds), specs)

    def evaluate_teacher(self, ds: Dataset, specs: Sequence[MetricSpec]) -> Dict[str, EvalReport]:
        """Evaluate the dataset's teacher scores as a run."""
        return self.evaluate_mappings(dataset_to_run(ds), dataset_to_qrels(ds), specs)
