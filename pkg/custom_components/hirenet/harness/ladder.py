"""
The model ladder: every sequential variant and the non-sequential baseline trained on
synthetic corpora over several seeds, compared by mean test F1.

Two corpus flavours isolate single properties of the models:

- ``context``: two job types share one motif but decide on different questions, so only
  a model reading the job title knows which answer matters.
- ``order``: every answer without the motif carries its reverse, so frame statistics
  cannot tell them apart and only order-aware models can.
"""
import logging
from pathlib import Path
from typing import Any, Callable, Dict, List, Literal, Optional, Union

import numpy as np
import pydantic

from ..interview_data.generator import generate_corpus
from ..interview_data.interview_models import GeneratorSpec, Modality
from ..interview_data.protocol import select_modality, split_corpus
from ..lib.config import HireNetConfig, Variant
from .baseline_runs import run_bow_baseline, run_stats_baseline
from .evaluation import evaluate
from .metrics import Metrics
from .reports import MetricsRow
from .training import fit

logger = logging.getLogger(__name__)

CorpusFlavour = Literal["default", "context", "order"]
LADDER_VARIANTS: List[Variant] = ["hirenet", "hn_satt", "hn_avg", "bigru_answerwise"]


def flavoured_spec(spec: GeneratorSpec, flavour: CorpusFlavour, seed: Optional[int] = None) -> GeneratorSpec:
    """``spec`` adjusted to one corpus flavour (and seed); validated again."""
    update: Dict[str, Any] = {} if seed is None else {"seed": seed}
    if flavour == "context":
        update.update(job_types=2, distinct_motifs=False, decisive_questions=None)
    elif flavour == "order":
        update.update(decoy_rate=1.0)
    return GeneratorSpec.model_validate({**spec.model_dump(), **update})


class LadderSettings(pydantic.BaseModel):
    """
    Attributes:
        spec: Base generator spec; its seed is replaced by each ladder seed.
        flavour: Corpus flavour.
        seeds: Seeds of generation, splitting, initialization and shuffling.
        modality: Modality the models read.
        variants: Sequential variants to train.
        baseline: Non-sequential baseline; ``stats`` unless the modality is text.
        config: Overrides of every model's ``HireNetConfig`` (dimensions, optimizer).
    """
    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    spec: GeneratorSpec = GeneratorSpec()
    flavour: CorpusFlavour = "default"
    seeds: List[int] = pydantic.Field(default_factory=lambda: [0, 1, 2], min_length=1)
    modality: Modality = "audio"
    variants: List[Variant] = pydantic.Field(default_factory=lambda: list(LADDER_VARIANTS))
    baseline: Optional[Literal["stats", "bow"]] = None
    config: Dict[str, Any] = {}

    @property
    def baseline_kind(self) -> str:
        if self.baseline is not None:
            return self.baseline
        return "bow" if self.modality == "text" else "stats"


class LadderRun(pydantic.BaseModel):
    seed: int
    model: str
    metrics: Metrics
    best_epoch: Optional[int] = None


class LadderReport(pydantic.BaseModel):
    flavour: CorpusFlavour
    modality: Modality
    runs: List[LadderRun]

    @property
    def models(self) -> List[str]:
        return list(dict.fromkeys(run.model for run in self.runs))

    def f1_of(self, model: str) -> List[float]:
        return [run.metrics.f1 for run in self.runs if run.model == model]

    @property
    def mean_f1(self) -> Dict[str, float]:
        return {model: float(np.mean(self.f1_of(model))) for model in self.models}

    def rows(self) -> List[MetricsRow]:
        return [MetricsRow.of(f"{run.model}@{run.seed}", self.modality, "test", run.metrics) for run in self.runs]


def config_for(settings: LadderSettings, spec: GeneratorSpec, variant: Variant, seed: int) -> HireNetConfig:
    data = {"feature_dim": spec.feature_dim(settings.modality), "vocab_size": spec.vocab_size, **settings.config,
            "variant": variant, "modality": settings.modality, "seed": seed}
    return HireNetConfig.model_validate(data)


def run_ladder(settings: LadderSettings, out_dir: Optional[Union[str, Path]] = None,
               on_run: Optional[Callable[[LadderRun], None]] = None) -> LadderReport:
    """
    Generates, splits, trains and evaluates every model for every seed.

    Checkpoints go to ``out_dir/<seed>/<variant>.json`` when ``out_dir`` is given.
    """
    runs: List[LadderRun] = []

    def record(run: LadderRun) -> None:
        runs.append(run)
        logger.info(f"ladder seed {run.seed}: {run.model} test F1 {run.metrics.f1:.4f}")
        if on_run is not None:
            on_run(run)

    for seed in settings.seeds:
        spec = flavoured_spec(settings.spec, settings.flavour, seed)
        corpus = select_modality(generate_corpus(spec), settings.modality)
        train, val, test = split_corpus(corpus, seed)
        seed_dir = Path(out_dir) / str(seed) if out_dir is not None else None
        for variant in settings.variants:
            config = config_for(settings, spec, variant, seed)
            report, params = fit(train, val, config, seed_dir, f"{variant}.json")
            evaluation = evaluate(params, test)
            record(LadderRun(seed=seed, model=variant, metrics=evaluation.metrics, best_epoch=report.best_epoch))
        if settings.baseline_kind == "stats":
            evaluation, _ = run_stats_baseline(train, test, spec.feature_kinds(settings.modality))
        else:
            evaluation, _, _ = run_bow_baseline(train, test, seed=seed, vocab_size=spec.vocab_size)
        record(LadderRun(seed=seed, model=settings.baseline_kind, metrics=evaluation.metrics))

    report = LadderReport(flavour=settings.flavour, modality=settings.modality, runs=runs)
    logger.info("ladder mean F1: " + ", ".join(f"{m} {f:.4f}" for m, f in report.mean_f1.items()))
    return report
