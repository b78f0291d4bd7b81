import hashlib
import itertools
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from typing import Dict, List, Optional, Sequence

import numpy as np

from app.core.exceptions import IncompatibleConfigurationError, RankDistillError, SweepError
from app.domain.entities.ranking import Dataset
from app.domain.entities.sweep import (
    STATUS_FAILED,
    STATUS_OK,
    STATUS_REFERENCE,
    TEACHER_METHOD,
    ResultRow,
    ResultTable,
    SweepRecord,
)
from app.domain.objective import effective_transform
from app.domain.repositories.sweep_record_repository import SweepRecordRepositoryInterface
from app.domain.significance import TTestResult, paired_ttest
from app.domain.student import prepare_validation, train, validation_metrics
from app.domain.validation import derive_task_constraints
from app.schemas.distill import DistillConfig, DistillLoss, SweepGrid, TaskKind
from app.schemas.metrics import STANDARD_METRIC_NAMES, MetricSpec, standard_metric_specs
from app.services.evaluation_service import EvaluationService

logger = logging.getLogger(__name__)


def config_id(cfg: DistillConfig) -> str:
    payload = json.dumps(cfg.model_dump(mode="json"), sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()[:16]


def _finite_or_none(value: float) -> Optional[float]:
    return float(value) if np.isfinite(value) else None


def run_grid_point(
    cfg: DistillConfig,
    ordinal: int,
    ds_train: Dataset,
    ds_val: Dataset,
    ds_test: Dataset,
    specs: Sequence[MetricSpec],
    sweep_id: str,
) -> SweepRecord:
    """Train one configuration and evaluate its validation-best model."""
    record = SweepRecord(
        sweep_id=sweep_id,
        config_id=config_id(cfg),
        ordinal=ordinal,
        method=cfg.method_name,
        status=STATUS_OK,
        config=cfg.model_dump(mode="json"),
        transform_on=effective_transform(cfg.distill_loss, cfg.transform_on),
    )
    try:
        run = train(ds_train, ds_val, cfg)
        vs_relevance, vs_teacher = validation_metrics(run.best_model, prepare_validation(ds_val))
        record.val_ndcg5 = _finite_or_none(vs_relevance if ds_val.has_relevance() else vs_teacher)
        record.best_step = run.best_step
        if ds_test.has_relevance():
            reports = EvaluationService().evaluate_model(run.best_model, ds_test, specs)
            record.test_metrics = {name: r.aggregate for name, r in reports.items()}
            record.test_per_query = {name: r.per_query for name, r in reports.items()}
    except RankDistillError as e:
        record.status = STATUS_FAILED
        record.error = f"{type(e).__name__}: {e}"
        logger.warning(f"Grid point {record.config_id} ({record.method}) failed: {record.error}")
    return record


class SweepUseCase:
    """Grid sweeps, model selection and the comparisons built on them."""

    def __init__(self, repository: SweepRecordRepositoryInterface, jobs: int = 1):
        self._repository = repository
        self._jobs = max(1, jobs)

    def expand_grid(
        self,
        grid: SweepGrid,
        base_cfg: DistillConfig,
        task: Optional[TaskKind] = None,
        max_list_length: Optional[int] = None,
    ) -> List[DistillConfig]:
        """Every distinct configuration of the grid, in a fixed order."""
        configs: List[DistillConfig] = []
        seen = set()
        for loss in grid.losses:
            if task is not None and not self._compatible(task, base_cfg, loss):
                continue
            if loss == DistillLoss.NONE:
                alphas = [1.0]
                modes = [False]
            else:
                # alpha 1 is the relevance-only objective whatever the loss
                alphas = [a for a in grid.alphas if a < 1.0]
                if not alphas:
                    logger.info(f"Skipping {loss.display_name}: the grid has no alpha below 1")
                    continue
                if loss == DistillLoss.RANKDISTIL:
                    modes = [True]
                elif loss.order_only:
                    modes = grid.transform_modes[:1]
                else:
                    modes = grid.transform_modes
            top_ks = grid.top_ks if loss.uses_top_k else [base_cfg.top_k]
            if max_list_length is not None and loss.uses_top_k:
                top_ks = [k for k in top_ks if k <= max_list_length]

            for lr, alpha, transform_on, top_k in itertools.product(grid.learning_rates, alphas, modes, top_ks):
                temperatures = grid.temperatures if transform_on and not loss.order_only else [base_cfg.temperature]
                for temperature in temperatures:
                    cfg = base_cfg.model_copy(update={
                        "distill_loss": loss,
                        "learning_rate": lr,
                        "alpha": alpha,
                        "transform_on": transform_on,
                        "temperature": temperature,
                        "top_k": top_k,
                    })
                    if task is not None:
                        cfg = derive_task_constraints(task, cfg)
                    key = config_id(cfg)
                    if key not in seen:
                        seen.add(key)
                        configs.append(cfg)
        return configs

    @staticmethod
    def _compatible(task: TaskKind, base_cfg: DistillConfig, loss: DistillLoss) -> bool:
        try:
            derive_task_constraints(task, base_cfg.model_copy(update={"distill_loss": loss}))
        except IncompatibleConfigurationError as e:
            logger.info(f"Skipping {loss.display_name} for task {task.value}: {e}")
            return False
        return True

    def run_sweep(
        self,
        ds_train: Dataset,
        ds_val: Dataset,
        ds_test: Dataset,
        grid: SweepGrid,
        base_cfg: DistillConfig,
        task: Optional[TaskKind] = None,
        specs: Optional[Sequence[MetricSpec]] = None,
        sweep_id: Optional[str] = None,
    ) -> ResultTable:
        """Train every grid point, store the records and select one per method."""
        specs = list(specs or standard_metric_specs())
        configs = self.expand_grid(grid, base_cfg, task, ds_train.max_list_length)
        if sweep_id is None:
            digest = hashlib.sha256("/".join(config_id(c) for c in configs).encode())
            sweep_id = digest.hexdigest()[:16]
        logger.info(f"Sweep {sweep_id}: {len(configs)} grid points on {self._jobs} worker(s)")

        point = partial(run_grid_point, ds_train=ds_train, ds_val=ds_val, ds_test=ds_test, specs=specs, sweep_id=sweep_id)
        if self._jobs > 1 and len(configs) > 1:
            with ProcessPoolExecutor(max_workers=self._jobs) as executor:
                records = list(executor.map(point, configs, range(len(configs))))
        else:
            records = [point(cfg, i) for i, cfg in enumerate(configs)]

        self._repository.delete_sweep(sweep_id)
        if ds_test.has_teacher_scores() and ds_test.has_relevance():
            records.insert(0, self._teacher_record(ds_test, specs, sweep_id))
        for record in records:
            self._repository.save(record)

        failed = sum(1 for r in records if r.status == STATUS_FAILED)
        if failed:
            logger.warning(f"Sweep {sweep_id}: {failed} of {len(configs)} grid points failed")
        return self.select_best(records, name=ds_test.name or sweep_id, metric_names=[s.name for s in specs])

    @staticmethod
    def _teacher_record(ds_test: Dataset, specs: Sequence[MetricSpec], sweep_id: str) -> SweepRecord:
        reports = EvaluationService().evaluate_teacher(ds_test, specs)
        return SweepRecord(
            sweep_id=sweep_id,
            config_id="teacher",
            ordinal=-1,
            method=TEACHER_METHOD,
            status=STATUS_REFERENCE,
            test_metrics={name: r.aggregate for name, r in reports.items()},
            test_per_query={name: r.per_query for name, r in reports.items()},
        )

    @staticmethod
    def select_best(
        records: Sequence[SweepRecord], name: str = "", metric_names: Optional[Sequence[str]] = None
    ) -> ResultTable:
        """Per method, the successful record with the best validation NDCG@5; the earliest wins ties."""
        metric_names = list(metric_names or STANDARD_METRIC_NAMES)
        ordered = sorted(records, key=lambda r: r.ordinal)
        methods: List[str] = []
        for record in ordered:
            if record.method not in methods:
                methods.append(record.method)

        rows = []
        for method in methods:
            candidates = [r for r in ordered if r.method == method]
            if candidates[0].status == STATUS_REFERENCE:
                chosen = candidates[0]
            else:
                usable = [r for r in candidates if r.succeeded]
                if not usable:
                    raise SweepError(f"every grid point of {method} failed")
                # max() keeps the first of equal keys
                chosen = max(usable, key=lambda r: -np.inf if r.val_ndcg5 is None else r.val_ndcg5)
                logger.info(f"Selected {method} point {chosen.config_id} (val NDCG@5 {chosen.val_ndcg5})")
            rows.append(ResultRow(
                method=method,
                config_id=chosen.config_id,
                metrics={m: chosen.test_metrics.get(m) for m in metric_names},
                per_query=dict(chosen.test_per_query),
                transform_on=chosen.transform_on,
                seed=chosen.config.get("seed"),
            ))
        return ResultTable(name=name, metric_names=metric_names, rows=rows)

    def has_sweep(self, sweep_id: str) -> bool:
        return bool(self._repository.list_by_sweep(sweep_id))

    def select_from_repository(self, sweep_id: str, metric_names: Optional[Sequence[str]] = None) -> ResultTable:
        """Rebuild the result table of a stored sweep without retraining."""
        records = self._repository.list_by_sweep(sweep_id)
        if not records:
            raise SweepError(f"no records stored for sweep {sweep_id}")
        return self.select_best(records, name=sweep_id, metric_names=metric_names)

    @staticmethod
    def significance_against(
        table: ResultTable, baseline: str, metric_names: Optional[Sequence[str]] = None
    ) -> Dict[str, Dict[str, TTestResult]]:
        """Paired t-test of every other row against the baseline row, per metric."""
        base = table.row(baseline)
        results: Dict[str, Dict[str, TTestResult]] = {}
        for row in table.rows:
            if row.method == baseline:
                continue
            per_metric = {}
            for metric in metric_names or table.metric_names:
                a, b = row.per_query.get(metric), base.per_query.get(metric)
                if not a or not b:
                    continue
                queries = sorted(set(a) & set(b))
                if len(queries) < 2:
                    continue
                per_metric[metric] = paired_ttest([a[q] for q in queries], [b[q] for q in queries])
            results[row.method] = per_metric
        return results

    @staticmethod
    def transform_selection(table: ResultTable) -> Dict[str, bool]:
        """Transform mode of each selected grid point."""
        return {row.method: row.transform_on for row in table.rows if row.transform_on is not None}
