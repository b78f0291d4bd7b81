"""Command-line entry point: python -m app.cli <command> [options]."""
import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

from pydantic import ValidationError

from app import __version__
from app.core.config import settings
from app.core.exceptions import FormatError, IncompatibleConfigurationError, RankDistillError
from app.core.seeding import derive_seed
from app.domain.entities.ranking import Dataset
from app.domain.metrics import check_metric_labels
from app.domain.ranking_aggregation import aggregate_ranks
from app.domain.student import score, train
from app.domain.use_cases.alpha_sensitivity_use_case import AlphaSensitivityUseCase
from app.domain.use_cases.sweep_use_case import SweepUseCase
from app.domain.validation import derive_task_constraints, validate_dataset
from app.infrastructure.formats import reports
from app.infrastructure.formats.libsvm import parse_libsvm_ranking, write_libsvm_ranking
from app.infrastructure.formats.trec import (
    attach_teacher_scores,
    dataset_to_run_records,
    parse_trec_run,
    run_to_dataset,
    write_trec_run,
)
from app.infrastructure.repositories.sqlalchemy_sweep_record_repository import SqlAlchemySweepRecordRepository
from app.models.database import SessionLocal, init_db
from app.schemas.distill import DistillConfig, DistillLoss, RelevanceLoss, SweepGrid, TaskKind
from app.schemas.manifest import RunManifest
from app.schemas.metrics import STANDARD_METRIC_NAMES, EmptyQueryPolicy, MetricSpec
from app.services.evaluation_service import EvaluationService
from app.services.score_statistics_service import ScoreStatisticsService
from app.services.synthetic_data_service import DEFAULT_LABEL_NOISE, SyntheticDataService

logger = logging.getLogger(__name__)

SPLITS = ("train", "val", "test")
MANIFEST_NAME = "manifest.json"
MAX_LOGGED_VIOLATIONS = 10
# synthetic labels are graded 0..4 with every positive relevant
SYNTHETIC_BINARIZE_THRESHOLD = 1.0


class RunContext:
    """Inputs read and artifacts written by one command."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.inputs: Dict[str, str] = {}
        self.artifacts: List[str] = []
        self.seeds: Dict[str, int] = {}

    def read_text(self, path: str) -> str:
        data = Path(path).read_bytes()
        self.inputs[str(path)] = hashlib.sha256(data).hexdigest()
        return data.decode("utf-8")

    def write(self, name: str, content: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / name
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(content)
        self.artifacts.append(str(path))
        logger.info(f"Wrote {path}")
        return path


def _csv_list(cast):
    def parse(text: str):
        try:
            return [cast(item) for item in text.split(",") if item.strip()]
        except ValueError as e:
            raise argparse.ArgumentTypeError(str(e))
    return parse


def _on_off(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return text == "on"


def _add_common(p: argparse.ArgumentParser, seed: bool = True) -> None:
    p.add_argument("--out-dir", default=settings.out_dir, help="output directory (env RDKIT_OUT_DIR)")
    if seed:
        p.add_argument("--seed", type=int, default=settings.seed, help="root seed of every random stream")


def _add_data(p: argparse.ArgumentParser, splits=SPLITS, required=("train",)) -> None:
    p.add_argument("--format", choices=["libsvm", "synthetic"], default="libsvm")
    for split in splits:
        p.add_argument(f"--{split}", required=False, help=f"{split} split (ranking LibSVM)")
        p.add_argument(f"--{split}-teacher", help=f"TREC run with teacher scores for the {split} split")
    p.set_defaults(required_splits=required)
    p.add_argument("--synth-queries", type=int, default=500, help="synthetic training queries")
    p.add_argument("--synth-eval-queries", type=int, default=200, help="synthetic validation/test queries")
    p.add_argument("--synth-list-len", type=_csv_list(int), default=[20, 20], help="min,max list length")
    p.add_argument("--feature-dim", type=int, default=8)
    p.add_argument("--teacher-quality", type=float, default=0.9)
    p.add_argument("--label-sparsity", type=float, default=0.05)
    p.add_argument("--label-noise", type=float, default=DEFAULT_LABEL_NOISE, help="judgment noise of synthetic labels")


def _add_config(p: argparse.ArgumentParser) -> None:
    p.add_argument("--rel-loss", choices=[e.value for e in RelevanceLoss], default=RelevanceLoss.SOFTMAX.value)
    p.add_argument("--distill-loss", choices=[e.value for e in DistillLoss], default=DistillLoss.SOFTMAX.value)
    p.add_argument("--alpha", type=float, default=None, help="relevance weight (default 0.5, or 1 without distillation)")
    p.add_argument("--temperature", type=float, default=1.0)
    p.add_argument("--transform", type=_on_off, default=True, help="softmax transform of teacher scores: on|off")
    p.add_argument("--top-k", type=int, default=5)
    p.add_argument("--samples", type=int, default=8, help="permutation samples for RankDistil")
    p.add_argument("--lr", type=float, default=1.0)
    p.add_argument("--batch-lists", type=int, default=128)
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--eval-every", type=int, default=None)
    p.add_argument("--task", choices=[t.value for t in TaskKind], default=None)


def _add_metrics(p: argparse.ArgumentParser, default: Optional[List[str]] = None) -> None:
    p.add_argument("--metric", action="append", default=None,
                   help=f"metric name, repeatable (default: {', '.join(default or STANDARD_METRIC_NAMES)})")
    p.add_argument("--cutoff", type=int, default=None, help="cutoff for metrics named without one")
    p.add_argument("--policy", choices=[e.value for e in EmptyQueryPolicy], default=EmptyQueryPolicy.IGNORE.value)
    p.add_argument("--binarize-threshold", type=float, default=None, help="label threshold for MRR")
    p.set_defaults(default_metrics=default or list(STANDARD_METRIC_NAMES))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="python -m app.cli", description="Ranking distillation toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="evaluate a TREC run against TREC qrels")
    p.add_argument("--run", required=True)
    p.add_argument("--qrels", required=True)
    _add_metrics(p)
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("train", help="train one linear student")
    _add_data(p)
    _add_config(p)
    _add_metrics(p)
    _add_common(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sweep", help="grid sweep with per-method selection")
    _add_data(p, required=SPLITS)
    _add_config(p)
    _add_metrics(p)
    _add_common(p)
    defaults = SweepGrid()
    p.add_argument("--grid-lrs", type=_csv_list(float), default=defaults.learning_rates)
    p.add_argument("--grid-alphas", type=_csv_list(float), default=defaults.alphas)
    p.add_argument("--grid-temperatures", type=_csv_list(float), default=defaults.temperatures)
    p.add_argument("--grid-top-ks", type=_csv_list(int), default=defaults.top_ks)
    p.add_argument("--grid-transforms", type=_csv_list(_on_off), default=defaults.transform_modes)
    p.add_argument("--losses", type=_csv_list(DistillLoss), default=defaults.losses)
    p.add_argument("--baseline", default=DistillLoss.NONE.display_name, help="row the significance tests compare against")
    p.add_argument("--jobs", type=int, default=settings.jobs, help="worker processes (env RDKIT_JOBS)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("alpha", help="validation metric as the relevance weight varies")
    _add_data(p, splits=("train", "val"), required=("train", "val"))
    _add_config(p)
    _add_common(p)
    p.add_argument("--losses", type=_csv_list(DistillLoss),
                   default=[DistillLoss.SOFTMAX, DistillLoss.MSE, DistillLoss.PAIR_MSE, DistillLoss.RANKDISTIL])
    p.add_argument("--alphas", type=_csv_list(float), default=[0.0, 0.25, 0.5, 0.75, 1.0])
    p.add_argument("--metric", default="MRR@10")
    p.add_argument("--binarize-threshold", type=float, default=None)
    p.set_defaults(func=cmd_alpha)

    p = sub.add_parser("stats", help="teacher score statistics")
    p.add_argument("--run", help="TREC run with teacher scores")
    _add_data(p, splits=("train",), required=())
    _add_common(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("synth", help="write a synthetic dataset")
    _add_data(p, splits=(), required=())
    _add_common(p)
    p.set_defaults(func=cmd_synth, format="synthetic")

    p = sub.add_parser("report", help="rank aggregation across result tables")
    p.add_argument("--tables", nargs="*", default=None, help="result table CSVs (default: bundled published tables)")
    p.add_argument("--metric", default="NDCG@5")
    _add_common(p, seed=False)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("rerun", help="re-execute the command recorded in a manifest")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_rerun)
    return parser


def _metric_specs(args) -> List[MetricSpec]:
    names = args.metric or args.default_metrics
    threshold = args.binarize_threshold
    if threshold is None and getattr(args, "format", None) == "synthetic":
        threshold = SYNTHETIC_BINARIZE_THRESHOLD
    specs = []
    for name in names:
        spec = MetricSpec.parse(
            name,
            empty_query_policy=EmptyQueryPolicy(args.policy),
            binarize_threshold=threshold,
        )
        if spec.cutoff is None and args.cutoff is not None:
            spec = spec.model_copy(update={"cutoff": args.cutoff})
        specs.append(spec)
    return specs


def _distill_config(args) -> DistillConfig:
    loss = DistillLoss(args.distill_loss)
    alpha = args.alpha
    if alpha is None:
        alpha = 1.0 if loss == DistillLoss.NONE else 0.5
    cfg = DistillConfig(
        relevance_loss=RelevanceLoss(args.rel_loss),
        distill_loss=loss,
        alpha=alpha,
        transform_on=args.transform,
        temperature=args.temperature,
        top_k=args.top_k,
        num_permutation_samples=args.samples,
        learning_rate=args.lr,
        batch_lists=args.batch_lists,
        train_steps=args.steps,
        eval_every=args.eval_every,
        seed=args.seed,
    )
    if args.task:
        cfg = derive_task_constraints(TaskKind(args.task), cfg)
    return cfg


def _check_dataset(ds: Dataset, source: str) -> Dataset:
    violations = validate_dataset(ds)
    for violation in violations[:MAX_LOGGED_VIOLATIONS]:
        logger.warning(f"{source}: {violation}")
    if violations:
        raise FormatError(f"{len(violations)} dataset violations, first: {violations[0]}", source=source)
    return ds


def _load_splits(args, ctx: RunContext, splits) -> Dict[str, Dataset]:
    loaded: Dict[str, Dataset] = {}
    if args.format == "synthetic":
        low, high = (args.synth_list_len + args.synth_list_len)[:2]
        for split in splits:
            seed = derive_seed(args.seed, "synthetic", split)
            ctx.seeds[f"synthetic/{split}"] = seed
            loaded[split] = SyntheticDataService().generate_synthetic(
                n_queries=args.synth_queries if split == "train" else args.synth_eval_queries,
                list_len_range=(low, high),
                feature_dim=args.feature_dim,
                teacher_quality=args.teacher_quality,
                label_sparsity=args.label_sparsity,
                label_noise=args.label_noise,
                seed=seed,
                name=split,
            )
        return loaded

    feature_dim = None
    for split in splits:
        path = getattr(args, split, None)
        if path is None:
            if split in args.required_splits:
                raise IncompatibleConfigurationError(f"--{split} is required with --format {args.format}")
            continue
        ds = parse_libsvm_ranking(ctx.read_text(path), source_name=path, feature_dim=feature_dim, name=split)
        feature_dim = ds.feature_dim
        teacher = getattr(args, f"{split}_teacher", None)
        if teacher:
            ds = attach_teacher_scores(ds, parse_trec_run(ctx.read_text(teacher), teacher))
        loaded[split] = _check_dataset(ds, path)
    return loaded


def _write_manifest(args, argv: List[str], ctx: RunContext) -> None:
    config = {
        k: (v.value if hasattr(v, "value") else v)
        for k, v in sorted(vars(args).items())
        if k not in ("func", "required_splits", "default_metrics")
    }
    if hasattr(args, "seed"):
        ctx.seeds.setdefault("root", args.seed)
    manifest = RunManifest(
        command=args.command,
        argv=argv,
        config=json.loads(json.dumps(config, default=lambda o: getattr(o, "value", str(o)))),
        seeds=ctx.seeds,
        inputs=ctx.inputs,
        artifacts=list(ctx.artifacts),
    )
    path = ctx.out_dir / MANIFEST_NAME
    ctx.out_dir.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps(manifest.model_dump(), indent=2, sort_keys=True) + "\n")
    logger.info(f"Wrote {path}")


def _resolved_argv(argv: List[str], args) -> List[str]:
    # pin defaults taken from the environment so a rerun does not depend on it
    resolved = list(argv)
    for flag, attr in (("--out-dir", "out_dir"), ("--seed", "seed")):
        if hasattr(args, attr) and not any(a == flag or a.startswith(flag + "=") for a in argv):
            resolved += [flag, str(getattr(args, attr))]
    return resolved


def cmd_evaluate(args, ctx: RunContext) -> None:
    specs = _metric_specs(args)
    reports_by_metric = EvaluationService().evaluate_trec(
        ctx.read_text(args.run), ctx.read_text(args.qrels), specs, args.run, args.qrels
    )
    print(reports.format_aggregates(reports_by_metric), end="")
    ctx.write("eval_summary.csv", reports.write_eval_summary(reports_by_metric))
    ctx.write("eval_per_query.csv", reports.write_eval_report(reports_by_metric))


def cmd_train(args, ctx: RunContext) -> None:
    cfg = _distill_config(args)
    data = _load_splits(args, ctx, SPLITS)
    specs = _metric_specs(args)
    if "test" in data:
        check_metric_labels(data["test"], specs)
    ds_val = data.get("val")
    if ds_val is None:
        logger.warning("No validation split given; selecting on the training split")
        ds_val = data["train"]

    run = train(data["train"], ds_val, cfg)
    ctx.write("model.csv", reports.write_model(run.best_model))
    ctx.write("model_final.csv", reports.write_model(run.final_model))
    ctx.write("learning_dynamics.csv", reports.export_learning_dynamics(run.traces))

    if "test" in data and data["test"].has_relevance():
        service = EvaluationService()
        results = service.evaluate_model(run.best_model, data["test"], specs)
        print(reports.format_aggregates(results), end="")
        ctx.write("test_summary.csv", reports.write_eval_summary(results))
        ctx.write("test_per_query.csv", reports.write_eval_report(results))
        scores = {rl.query_id: score(run.best_model, rl) for rl in data["test"]}
        ctx.write("test.run", write_trec_run(dataset_to_run_records(data["test"], scores, "student")))


def cmd_sweep(args, ctx: RunContext) -> None:
    base_cfg = _distill_config(args)
    grid = SweepGrid(
        learning_rates=args.grid_lrs,
        alphas=args.grid_alphas,
        temperatures=args.grid_temperatures,
        top_ks=args.grid_top_ks,
        transform_modes=args.grid_transforms,
        losses=args.losses,
    )
    data = _load_splits(args, ctx, SPLITS)
    specs = _metric_specs(args)
    check_metric_labels(data["test"], specs)
    task = TaskKind(args.task) if args.task else None

    init_db()
    db = SessionLocal()
    try:
        use_case = SweepUseCase(SqlAlchemySweepRecordRepository(db), jobs=args.jobs)
        table = use_case.run_sweep(
            data["train"], data["val"], data["test"], grid, base_cfg, task=task, specs=specs
        )
    finally:
        db.close()

    ctx.write("results.csv", reports.write_result_table(table))
    ctx.write("transform_selection.csv", reports.write_transform_selection(use_case.transform_selection(table)))
    if args.baseline in table:
        significance = use_case.significance_against(table, args.baseline)
        ctx.write("significance.csv", reports.write_significance(significance, args.baseline))
    else:
        logger.warning(f"Baseline {args.baseline!r} is not in the result table; skipping significance tests")
    print(reports.write_result_table(table), end="")


def cmd_alpha(args, ctx: RunContext) -> None:
    base_cfg = _distill_config(args)
    data = _load_splits(args, ctx, ("train", "val"))
    threshold = args.binarize_threshold
    if threshold is None and args.format == "synthetic":
        threshold = SYNTHETIC_BINARIZE_THRESHOLD
    check_metric_labels(data["val"], [MetricSpec.parse(args.metric, binarize_threshold=threshold)])
    points = AlphaSensitivityUseCase().alpha_sensitivity(
        data["train"], data["val"], args.losses, args.alphas, base_cfg,
        metric=args.metric, binarize_threshold=threshold,
    )
    ctx.write("alpha_curve.csv", reports.write_alpha_curve(points, args.metric))


def cmd_stats(args, ctx: RunContext) -> None:
    if args.run:
        ds = run_to_dataset(parse_trec_run(ctx.read_text(args.run), args.run), name=args.run)
    elif args.format == "synthetic" or args.train:
        ds = _load_splits(args, ctx, ("train",))["train"]
    else:
        raise IncompatibleConfigurationError("stats needs --run, --train or --format synthetic")
    stats = ScoreStatisticsService().teacher_score_stats(ds)
    print(reports.format_stats(stats), end="")
    ctx.write("teacher_stats.csv", reports.write_stats(stats, ds.name))


def cmd_synth(args, ctx: RunContext) -> None:
    data = _load_splits(argparse.Namespace(**{**vars(args), "format": "synthetic"}), ctx, SPLITS)
    for split, ds in data.items():
        ctx.write(f"{split}.txt", write_libsvm_ranking(ds))
        teacher = {rl.query_id: rl.teacher_scores for rl in ds}
        ctx.write(f"{split}_teacher.run", write_trec_run(dataset_to_run_records(ds, teacher, "teacher")))


def cmd_report(args, ctx: RunContext) -> None:
    if args.tables:
        tables = [reports.read_result_table(ctx.read_text(p), name=p) for p in args.tables]
    else:
        tables = reports.load_published_tables(settings.published_results_dir)
    summaries = aggregate_ranks(tables, metric=args.metric)
    content = reports.write_rank_summary(summaries)
    print(content, end="")
    ctx.write("ranks.csv", content)


def cmd_rerun(args, ctx: RunContext) -> int:
    manifest = RunManifest(**json.loads(Path(args.manifest).read_text(encoding="utf-8")))
    logger.info(f"Re-running {manifest.command} recorded by version {manifest.version}")
    return main(manifest.argv)


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(level=settings.log_level)
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "format", None) == "libsvm":
        missing = [s for s in args.required_splits if getattr(args, s, None) is None]
        if missing:
            parser.error(f"--{missing[0]} is required with --format libsvm")

    if args.command == "rerun":
        try:
            return cmd_rerun(args, None)
        except (OSError, ValueError) as e:
            logger.error(f"rerun failed: {e}")
            return 1

    ctx = RunContext(Path(args.out_dir))
    try:
        args.func(args, ctx)
    except (RankDistillError, ValidationError, OSError) as e:
        logger.error(f"{args.command} failed: {e}")
        return 1
    _write_manifest(args, _resolved_argv(argv, args), ctx)
    return 0


if __name__ == "__main__":
    sys.exit(main())
