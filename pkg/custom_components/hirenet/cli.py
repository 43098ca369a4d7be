"""
Command-line interface: ``hirenet <command> ...``.

Exit codes: 0 on success, 2 on an invalid input or configuration, 3 on a numeric failure.
"""
import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import pydantic

from .errors import CheckpointError, ContractViolation, CorpusParseError, NumericError
from .harness.attention_export import export_attention, find_candidate, summarize_attention
from .harness.baseline_runs import run_bow_baseline, run_stats_baseline, run_vote_baselines
from .harness.evaluation import Evaluation, evaluate
from .harness.fusion_runs import FUSION_MODES, fit_fusion, run_fusion
from .harness.ladder import LadderSettings, run_ladder
from .harness.reports import MetricsRow, write_json, write_metrics_csv, write_scores_csv
from .harness.training import train
from .interview_data.corpus_io import SPEC_FILE, load_data_dir, load_generator_spec, save_data_dir
from .interview_data.describe import describe_corpus
from .interview_data.generator import generate_corpus
from .interview_data.protocol import SPLITS, apply_split, split_ids
from .lib.checkpoint import load_checkpoint, save_fusion, save_linear, save_vocabulary
from .lib.config import HireNetConfig

logger = logging.getLogger(__name__)

LOG_LEVEL_ENV = "HIRENET_LOG_LEVEL"
EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3
MODALITIES = ("text", "audio", "video")
VARIANTS = ("hirenet", "hn_satt", "hn_avg", "bigru", "bigru_answerwise")


def _splits(data: Path) -> Dict[str, list]:
    corpus, manifest = load_data_dir(data)
    return dict(zip(SPLITS, apply_split(corpus, manifest)))


def _metrics_report(path: Optional[str], evaluations: Sequence[Evaluation]) -> None:
    if path is None:
        return
    write_metrics_csv(path, [MetricsRow.of(e.model, e.modality, e.split, e.metrics) for e in evaluations])
    logger.info(f"Wrote metrics to {path}")


def _print(model: pydantic.BaseModel) -> None:
    print(model.model_dump_json(indent=2))


def cmd_generate_data(args: argparse.Namespace) -> None:
    spec = load_generator_spec(args.spec)
    if args.seed is not None:
        spec = spec.model_copy(update={"seed": args.seed})
    corpus = generate_corpus(spec)
    manifest = split_ids(corpus, spec.seed if args.split_seed is None else args.split_seed)
    save_data_dir(args.out, corpus, manifest, spec)
    logger.info(f"Wrote {len(corpus)} interview records to {args.out}")


def cmd_train(args: argparse.Namespace) -> None:
    config = HireNetConfig.from_file(args.config, modality=args.modality, variant=args.variant, seed=args.seed)
    parts = _splits(Path(args.data))
    out = Path(args.out)
    report = train(parts["train"], parts["val"], config, out)
    write_json(out / "train_report.json", report)
    logger.info(f"Best epoch {report.best_epoch} with validation F1 {report.best_validation.f1:.4f}")


def cmd_evaluate(args: argparse.Namespace) -> None:
    params = load_checkpoint(args.checkpoint)
    evaluation = evaluate(params, _splits(Path(args.data))[args.split], args.split, args.workers)
    _metrics_report(args.report, [evaluation])
    if args.scores is not None:
        write_scores_csv(args.scores, evaluation)
    _print(evaluation.metrics)


def cmd_fuse(args: argparse.Namespace) -> None:
    models = [load_checkpoint(path) for path in args.checkpoints]
    parts = _splits(Path(args.data))
    fusion_model = None
    if args.mode == "early":
        fusion_model = fit_fusion(models, parts["train"], args.l2, args.workers)
        if args.out is not None:
            save_fusion(args.out, fusion_model, checkpoints=list(args.checkpoints))
    evaluation = run_fusion(args.mode, models, parts[args.split], fusion_model, split=args.split, workers=args.workers)
    _metrics_report(args.report, [evaluation])
    if args.scores is not None:
        write_scores_csv(args.scores, evaluation)
    _print(evaluation.metrics)


def cmd_baseline(args: argparse.Namespace) -> None:
    parts = _splits(Path(args.data))
    train_set = [r for r in parts["train"] if r.modality == args.modality]
    test_set = [r for r in parts[args.split] if r.modality == args.modality]
    if args.kind == "votes":
        _print(run_vote_baselines(parts["train"], parts[args.split], args.draws, args.seed))
        return
    out = Path(args.out) if args.out is not None else None
    if args.kind == "stats":
        spec_path = Path(args.data) / SPEC_FILE
        kinds = load_generator_spec(spec_path).feature_kinds(args.modality) if spec_path.exists() else None
        evaluation, model = run_stats_baseline(train_set, test_set, kinds, args.l2, args.split)
    else:
        evaluation, model, vocabulary = run_bow_baseline(train_set, test_set, args.k, args.seed, args.vocab_size,
                                                         args.l2, args.split)
        if out is not None:
            save_vocabulary(out / "codebook.json", vocabulary, modality=args.modality)
    if out is not None:
        save_linear(out / f"{args.kind}_classifier.json", model, kind=args.kind, modality=args.modality)
    _metrics_report(args.report, [evaluation])
    _print(evaluation.metrics)


def cmd_attention_export(args: argparse.Namespace) -> None:
    params = load_checkpoint(args.checkpoint)
    corpus, _ = load_data_dir(args.data)
    report = export_attention(params, find_candidate(corpus, args.candidate, params.config.modality))
    write_json(args.out, report)
    logger.info(f"Wrote attention of {args.candidate} to {args.out}")


def cmd_attention_summary(args: argparse.Namespace) -> None:
    params = load_checkpoint(args.checkpoint)
    summary = summarize_attention(params, _splits(Path(args.data))[args.split], args.top_k, args.workers)
    if args.out is not None:
        write_json(args.out, summary)
    else:
        _print(summary)


def cmd_describe_data(args: argparse.Namespace) -> None:
    parts = _splits(Path(args.data))
    rows = describe_corpus([r for split in SPLITS for r in parts[split]], parts)
    print(json.dumps([row.model_dump() for row in rows], indent=2))


def cmd_ladder(args: argparse.Namespace) -> None:
    settings = LadderSettings()
    if args.settings is not None:
        settings = LadderSettings.model_validate_json(Path(args.settings).read_text())
    overrides = {"flavour": args.flavour, "modality": args.modality, "seeds": args.seeds}
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if overrides:
        settings = LadderSettings.model_validate({**settings.model_dump(), **overrides})
    out = Path(args.out)
    report = run_ladder(settings, out)
    write_json(out / "ladder_report.json", report)
    write_metrics_csv(out / "ladder_metrics.csv", report.rows())
    print(json.dumps(report.mean_f1, indent=2))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hirenet", description="Hierarchical attention models of interview hirability")
    parser.add_argument("--log-level", default=os.environ.get(LOG_LEVEL_ENV, "INFO"),
                        help=f"logging level (default: ${LOG_LEVEL_ENV} or INFO)")
    commands = parser.add_subparsers(dest="command", required=True)

    def command(name: str, handler: Callable[[argparse.Namespace], None], help_text: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, help=help_text)
        sub.set_defaults(handler=handler)
        return sub

    sub = command("generate-data", cmd_generate_data, "generate a synthetic corpus and its split")
    sub.add_argument("--spec", required=True, help="generator spec JSON")
    sub.add_argument("--out", required=True, help="data directory to write")
    sub.add_argument("--seed", type=int, help="override the generator seed")
    sub.add_argument("--split-seed", type=int, help="seed of the split (default: the generator seed)")

    sub = command("train", cmd_train, "train one monomodal model")
    sub.add_argument("--config", required=True, help="model config JSON")
    sub.add_argument("--data", required=True)
    sub.add_argument("--modality", choices=MODALITIES)
    sub.add_argument("--variant", choices=VARIANTS)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--out", required=True, help="directory of the checkpoint and the train report")

    sub = command("evaluate", cmd_evaluate, "evaluate a checkpoint on a split")
    sub.add_argument("--checkpoint", required=True)
    sub.add_argument("--data", required=True)
    sub.add_argument("--split", choices=SPLITS, default="test")
    sub.add_argument("--report", help="metrics CSV to write")
    sub.add_argument("--scores", help="per-candidate scores CSV to write")
    sub.add_argument("--workers", type=int, default=1)

    sub = command("fuse", cmd_fuse, "fuse monomodal checkpoints")
    sub.add_argument("--mode", choices=FUSION_MODES, required=True)
    sub.add_argument("--checkpoints", nargs="+", required=True, help="one checkpoint per modality")
    sub.add_argument("--data", required=True)
    sub.add_argument("--split", choices=SPLITS, default="test")
    sub.add_argument("--l2", type=float, default=1e-3)
    sub.add_argument("--out", help="where to write the early-fusion classifier")
    sub.add_argument("--report")
    sub.add_argument("--scores")
    sub.add_argument("--workers", type=int, default=1)

    sub = command("baseline", cmd_baseline, "run a non-sequential or vote baseline")
    sub.add_argument("--kind", choices=("stats", "bow", "votes"), required=True)
    sub.add_argument("--data", required=True)
    sub.add_argument("--modality", choices=MODALITIES, default="audio")
    sub.add_argument("--split", choices=SPLITS, default="test")
    sub.add_argument("--k", type=int, default=64, help="codebook size of bow")
    sub.add_argument("--vocab-size", type=int, default=0, help="word vocabulary of text bow (default: inferred)")
    sub.add_argument("--l2", type=float, default=1e-3)
    sub.add_argument("--draws", type=int, default=1000)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--out", help="directory of the fitted baseline")
    sub.add_argument("--report")

    sub = command("attention-export", cmd_attention_export, "export the attention of one candidate")
    sub.add_argument("--checkpoint", required=True)
    sub.add_argument("--data", required=True)
    sub.add_argument("--candidate", required=True)
    sub.add_argument("--out", required=True)

    sub = command("attention-summary", cmd_attention_summary, "most attended items over a split")
    sub.add_argument("--checkpoint", required=True)
    sub.add_argument("--data", required=True)
    sub.add_argument("--split", choices=SPLITS, default="test")
    sub.add_argument("--top-k", type=int, default=20)
    sub.add_argument("--out")
    sub.add_argument("--workers", type=int, default=1)

    sub = command("describe-data", cmd_describe_data, "descriptive statistics of a data directory")
    sub.add_argument("--data", required=True)

    sub = command("ladder", cmd_ladder, "train and compare every model over several seeds")
    sub.add_argument("--settings", help="ladder settings JSON")
    sub.add_argument("--flavour", choices=("default", "context", "order"))
    sub.add_argument("--modality", choices=MODALITIES)
    sub.add_argument("--seeds", type=int, nargs="+")
    sub.add_argument("--out", required=True)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level.upper(), format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        args.handler(args)
    except NumericError as e:
        logger.error(f"numeric failure: {e}")
        return EXIT_NUMERIC
    except (pydantic.ValidationError, ContractViolation, CorpusParseError, CheckpointError, FileNotFoundError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
