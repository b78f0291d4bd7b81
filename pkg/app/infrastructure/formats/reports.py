import csv
import io
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence

from app.domain.entities.evaluation import EvalReport, ScoreStats
from app.domain.entities.student import LinearModel, TrainTrace
from app.domain.entities.sweep import ResultRow, ResultTable
from app.domain.ranking_aggregation import RankSummary
from app.domain.significance import TTestResult
from app.domain.use_cases.alpha_sensitivity_use_case import AlphaPoint

DYNAMICS_COLUMNS = ["step", "train_loss", "ndcg5_vs_relevance", "ndcg5_vs_teacher"]
STATS_COLUMNS = ["Mean", "Std", "Min", "25%", "50%", "75%", "Max"]
RESULT_KEY_COLUMNS = ["method", "config", "transform", "seed"]


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "on" if value else "off"
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def _optional_float(text: str) -> Optional[float]:
    text = text.strip()
    if text == "" or text.lower() == "n/a":
        return None
    return float(text)


def _render(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def _records(text: str) -> List[Dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))


def write_eval_report(reports: Mapping[str, EvalReport]) -> str:
    """Per-query values, one column per metric; dropped queries stay empty."""
    names = list(reports)
    queries = sorted({q for r in reports.values() for q in r.per_query})
    rows = [[q] + [reports[m].per_query.get(q) for m in names] for q in queries]
    return _render(["query_id"] + names, rows)


def write_eval_summary(reports: Mapping[str, EvalReport]) -> str:
    rows = [
        [name, r.aggregate, r.retained_count, r.dropped_count, r.empty_query_policy]
        for name, r in reports.items()
    ]
    return _render(["metric", "aggregate", "retained", "dropped", "policy"], rows)


def format_aggregates(reports: Mapping[str, EvalReport]) -> str:
    names = list(reports)
    header = " ".join(f"{n:>8}" for n in names)
    values = " ".join(f"{reports[n].aggregate:8.2f}" for n in names)
    return f"{header}\n{values}\n"


def write_result_table(table: ResultTable) -> str:
    rows = [
        [r.method, r.config_id, r.transform_on, r.seed] + [r.metrics.get(m) for m in table.metric_names]
        for r in table.rows
    ]
    return _render(RESULT_KEY_COLUMNS + list(table.metric_names), rows)


def read_result_table(text: str, name: str = "") -> ResultTable:
    """Parse a result table CSV; only the method column is required."""
    records = _records(text)
    if not records:
        return ResultTable(name=name, metric_names=[])
    metric_names = [c for c in records[0] if c not in RESULT_KEY_COLUMNS]
    rows = []
    for record in records:
        transform = record.get("transform", "")
        seed = record.get("seed", "")
        rows.append(ResultRow(
            method=record["method"],
            config_id=record.get("config", ""),
            metrics={m: _optional_float(record[m] or "") for m in metric_names},
            transform_on={"on": True, "off": False}.get(transform),
            seed=int(seed) if seed else None,
        ))
    return ResultTable(name=name, metric_names=metric_names, rows=rows)


def write_model(model: LinearModel) -> str:
    rows = [[f"w{i}", float(w)] for i, w in enumerate(model.weights, start=1)]
    rows.append(["bias", model.bias])
    return _render(["parameter", "value"], rows)


def read_model(text: str) -> LinearModel:
    values = {r["parameter"]: float(r["value"]) for r in _records(text)}
    bias = values.pop("bias", 0.0)
    weights = [values[f"w{i}"] for i in range(1, len(values) + 1)]
    return LinearModel(weights=weights, bias=bias)


def write_stats(stats: ScoreStats, label: str = "") -> str:
    return _render(["dataset"] + STATS_COLUMNS, [[label] + stats.as_row()])


def format_stats(stats: ScoreStats) -> str:
    header = " ".join(f"{c:>10}" for c in STATS_COLUMNS)
    values = " ".join(f"{v:10.2f}" for v in stats.as_row())
    return f"{header}\n{values}\n"


def export_learning_dynamics(traces: Sequence[TrainTrace]) -> str:
    rows = [
        [t.step, t.train_loss, t.val_metric_vs_relevance, t.val_metric_vs_teacher]
        for t in sorted(traces, key=lambda t: t.step)
    ]
    return _render(DYNAMICS_COLUMNS, rows)


def read_learning_dynamics(text: str) -> List[TrainTrace]:
    return [
        TrainTrace(
            step=int(r["step"]),
            train_loss=float(r["train_loss"]),
            val_metric_vs_relevance=float(r["ndcg5_vs_relevance"]),
            val_metric_vs_teacher=float(r["ndcg5_vs_teacher"]),
        )
        for r in _records(text)
    ]


def write_rank_summary(summaries: Sequence[RankSummary]) -> str:
    return _render(
        ["method", "best_rank", "worst_rank", "mean_rank", "tables"],
        [[s.method, s.best, s.worst, s.mean, s.tables] for s in summaries],
    )


def write_significance(results: Mapping[str, Mapping[str, TTestResult]], baseline: str) -> str:
    rows = []
    for method, per_metric in results.items():
        for metric, r in per_metric.items():
            rows.append([method, baseline, metric, r.t, r.p, str(r.significant_at_001).lower()])
    return _render(["method", "baseline", "metric", "t", "p", "significant_at_0.01"], rows)


def write_alpha_curve(points: Sequence[AlphaPoint], metric: str) -> str:
    return _render(["method", "alpha", metric], [[p.method, p.alpha, p.value] for p in points])


def write_transform_selection(selection: Mapping[str, bool]) -> str:
    return _render(["method", "transform"], list(selection.items()))


PUBLISHED_DIR = Path(__file__).resolve().parents[2] / "resources" / "published"
PUBLISHED_CONFIGURATIONS = ("msmarco", "nq", "nq_transfer", "nq_zeroshot", "web30k", "istella")


def load_published_tables(directory: Optional[Path] = None) -> List[ResultTable]:
    """Bundled result tables of the six reported task configurations."""
    directory = Path(directory) if directory else PUBLISHED_DIR
    return [
        read_result_table((directory / f"{name}.csv").read_text(encoding="utf-8"), name=name)
        for name in PUBLISHED_CONFIGURATIONS
    ]
