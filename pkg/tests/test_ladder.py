import numpy as np
import pytest

from factories import small_spec
from hirenet.harness.ladder import LadderReport, LadderRun, LadderSettings, config_for, flavoured_spec, run_ladder
from hirenet.harness.metrics import Metrics
from hirenet.interview_data.interview_models import GeneratorSpec
from hirenet.lib.checkpoint import load_checkpoint

TINY_MODEL = {"embed_dim": 2, "low_hidden": 2, "question_hidden": 2, "high_hidden": 2, "job_hidden": 2,
              "optimizer": {"learning_rate": 1e-2, "batch_size": 8, "max_epochs": 1, "patience": 1}}

LADDER_MODEL = {"embed_dim": 8, "low_hidden": 8, "question_hidden": 8, "high_hidden": 8, "job_hidden": 8,
                "optimizer": {"learning_rate": 5e-3, "batch_size": 16, "max_epochs": 25, "patience": 5}}


def test_flavours():
    spec = small_spec(job_types=1, decoy_rate=0.2)
    context = flavoured_spec(spec, "context", seed=9)
    assert (context.job_types, context.distinct_motifs, context.seed) == (2, False, 9)
    assert context.decisive_index_by_type[0] != context.decisive_index_by_type[1]
    assert flavoured_spec(spec, "order").decoy_rate == 1.0
    assert flavoured_spec(spec, "default") == spec


def test_config_takes_dimensions_from_the_spec():
    settings = LadderSettings(spec=small_spec(), modality="video", config=TINY_MODEL)
    config = config_for(settings, settings.spec, "hn_satt", 4)
    assert (config.feature_dim, config.vocab_size, config.seed) == (6, 40, 4)
    assert (config.variant, config.modality, config.low_hidden) == ("hn_satt", "video", 2)
    assert settings.baseline_kind == "stats"
    assert LadderSettings(modality="text").baseline_kind == "bow"


def test_report_aggregates_by_model():
    def run(seed, model, f1):
        return LadderRun(seed=seed, model=model, metrics=Metrics(precision=f1, recall=f1, f1=f1))

    report = LadderReport(flavour="default", modality="audio",
                          runs=[run(0, "hirenet", 0.9), run(0, "stats", 0.5), run(1, "hirenet", 0.7)])
    assert report.models == ["hirenet", "stats"]
    assert report.f1_of("hirenet") == [0.9, 0.7]
    assert report.mean_f1 == pytest.approx({"hirenet": 0.8, "stats": 0.5})
    assert [row.model for row in report.rows()] == ["hirenet@0", "stats@0", "hirenet@1"]


def test_small_ladder(tmp_path):
    settings = LadderSettings(spec=small_spec(), seeds=[0], variants=["hn_avg", "bigru_answerwise"],
                              config=TINY_MODEL)
    seen = []
    report = run_ladder(settings, tmp_path, on_run=seen.append)
    assert report.models == ["hn_avg", "bigru_answerwise", "stats"]
    assert seen == report.runs
    assert report.runs[0].best_epoch == 1 and report.runs[-1].best_epoch is None
    assert load_checkpoint(tmp_path / "0" / "hn_avg.json").config.variant == "hn_avg"


def _ladder(**settings) -> LadderReport:
    return run_ladder(LadderSettings(spec=GeneratorSpec(), config=LADDER_MODEL, **settings))


@pytest.mark.slow
def test_hirenet_ranks_first_on_the_default_corpus():
    means = _ladder().mean_f1
    assert means["hirenet"] >= 0.95
    assert means["hn_satt"] >= means["hn_avg"] >= means["bigru_answerwise"]


@pytest.mark.slow
def test_job_title_context_is_needed():
    means = _ladder(flavour="context", variants=["hirenet", "hn_satt"]).mean_f1
    assert means["hirenet"] - means["hn_satt"] >= 0.05


@pytest.mark.slow
def test_order_aware_models_beat_frame_statistics():
    report = _ladder(flavour="order", variants=["bigru_answerwise"])
    assert np.mean(report.f1_of("bigru_answerwise")) - np.mean(report.f1_of("stats")) >= 0.05
