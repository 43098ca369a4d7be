import numpy as np
import pytest

from factories import random_arrays, tiny_config
from hirenet.baselines.statistics import aggregate_stats
from hirenet.errors import ContractViolation, DegenerateInputError
from hirenet.harness.baseline_runs import answer_matrix, infer_feature_kinds, one_record_per_candidate, \
    run_bow_baseline, run_stats_baseline, run_vote_baselines
from hirenet.harness.evaluation import evaluate, scores_by_candidate
from hirenet.harness.fusion_runs import check_models, fit_fusion, modal_outputs, run_fusion
from hirenet.interview_data.protocol import select_modality, split_corpus
from hirenet.lib.parameters import init_model


@pytest.fixture(scope="module")
def splits(corpus):
    return split_corpus(corpus)


def _model(modality, seed):
    feature_dim = {"audio": 3, "video": 6, "text": 3}[modality]
    params = init_model(tiny_config(modality=modality, feature_dim=feature_dim))
    return params.replace(random_arrays(params, np.random.default_rng(seed)))


class TestBaselineRuns:
    def test_feature_kinds_follow_the_generator(self, spec, corpus):
        assert infer_feature_kinds(select_modality(corpus, "video")) == spec.feature_kinds("video")
        assert infer_feature_kinds(select_modality(corpus, "audio")) == ["continuous"] * 3

    def test_one_row_per_answer(self, corpus):
        audio = select_modality(corpus, "audio")[:4]
        x, y = answer_matrix(audio, lambda answer: answer.mean(axis=0))
        assert x.shape == (12, 3)
        assert y.tolist() == [r.y for r in audio for _ in range(3)]

    @pytest.mark.parametrize("modality", ["audio", "video"])
    def test_stats_baseline(self, splits, spec, modality):
        train, _, test = (select_modality(part, modality) for part in splits)
        evaluation, model = run_stats_baseline(train, test, spec.feature_kinds(modality))
        assert (evaluation.model, evaluation.modality, evaluation.split) == ("stats", modality, "test")
        assert [s.candidate_id for s in evaluation.scores] == [r.candidate_id for r in test]
        assert model.standardizer is not None
        inferred, _ = run_stats_baseline(train, test)
        assert inferred.scores == evaluation.scores

    def test_stats_baseline_rejects_text(self, splits):
        train, _, test = (select_modality(part, "text") for part in splits)
        with pytest.raises(ContractViolation, match="bow"):
            run_stats_baseline(train, test)

    @pytest.mark.parametrize("modality", ["text", "audio"])
    def test_bow_baseline(self, splits, modality):
        train, _, test = (select_modality(part, modality) for part in splits)
        evaluation, _, vocabulary = run_bow_baseline(train, test, k=4)
        assert evaluation.model == "bow"
        assert len(evaluation.scores) == len(test)
        assert vocabulary.documents == 3 * len(train)
        if modality == "text":
            assert vocabulary.codebook is None and vocabulary.k <= 40
        else:
            assert vocabulary.k == 4

    def test_candidate_score_is_the_mean_answer_score(self, splits):
        train, _, test = (select_modality(part, "audio") for part in splits)
        evaluation, model = run_stats_baseline(train, test)
        record = test[0]
        kinds = ["continuous"] * 3
        answers = np.stack([aggregate_stats(pair.answer, kinds).as_array() for pair in record.qa])
        assert evaluation.scores[0].score == pytest.approx(model.predict_proba(answers).mean())

    def test_votes_count_each_candidate_once(self, splits):
        train, _, test = splits
        assert len(one_record_per_candidate(test)) == len(select_modality(test, "audio"))
        results = run_vote_baselines(train, test, draws=20)
        assert results.draws == 20
        assert results.majority.tp + results.majority.fp + results.majority.fn + results.majority.tn == \
            len(one_record_per_candidate(test))

    def test_empty_inputs(self, splits):
        train = select_modality(splits[0], "audio")
        with pytest.raises(DegenerateInputError):
            run_stats_baseline(train, [])
        with pytest.raises(DegenerateInputError):
            run_bow_baseline([], train)


class TestFusionRuns:
    def test_outputs_per_candidate_and_modality(self, splits):
        _, _, test = splits
        outputs = modal_outputs([_model("audio", 0), _model("text", 1)], test)
        assert set(outputs) == {r.candidate_id for r in test}
        representation, score = outputs[test[0].candidate_id]["audio"]
        assert representation.shape == (4,) and 0 < score < 1

    def test_late_fusion_averages_the_modal_scores(self, splits):
        _, _, test = splits
        audio, text = _model("audio", 0), _model("text", 1)
        evaluation = run_fusion("late", [audio, text], test)
        audio_scores = scores_by_candidate(evaluate(audio, test))
        text_scores = scores_by_candidate(evaluate(text, test))
        assert (evaluation.model, evaluation.modality) == ("late_fusion", "fusion")
        ids = [s.candidate_id for s in evaluation.scores]
        assert ids == sorted(ids)
        for score in evaluation.scores:
            expected = (audio_scores[score.candidate_id] + text_scores[score.candidate_id]) / 2
            assert score.score == pytest.approx(expected)

    def test_late_fusion_of_one_model_is_that_model(self, splits):
        _, _, test = splits
        audio = _model("audio", 2)
        fused = scores_by_candidate(run_fusion("late", [audio], test))
        assert fused == pytest.approx(scores_by_candidate(evaluate(audio, test)))

    def test_early_fusion(self, splits):
        train, _, test = splits
        models = [_model("audio", 0), _model("video", 1), _model("text", 2)]
        fusion_model = fit_fusion(models, train)
        assert fusion_model.modalities == ["audio", "video", "text"]
        assert fusion_model.input_dim == 12
        evaluation = run_fusion("early", models, test, fusion_model, split="test")
        assert evaluation.model == "early_fusion"
        assert len(evaluation.scores) == len(one_record_per_candidate(test))

    def test_missing_modalities_are_tolerated(self, splits):
        train, _, test = splits
        models = [_model("audio", 0), _model("text", 1)]
        fusion_model = fit_fusion(models, train)
        partial = [r for r in test if r.modality == "audio" or r.candidate_id != test[0].candidate_id]
        early = run_fusion("early", models, partial, fusion_model)
        late = run_fusion("late", models, partial)
        assert len(early.scores) == len(late.scores) == len(one_record_per_candidate(test))
        only_audio = scores_by_candidate(late)[test[0].candidate_id]
        assert only_audio == pytest.approx(scores_by_candidate(evaluate(models[0], test))[test[0].candidate_id])

    def test_contracts(self, splits):
        _, _, test = splits
        audio = _model("audio", 0)
        with pytest.raises(ContractViolation, match="one model per modality"):
            check_models([audio, _model("audio", 1)])
        with pytest.raises(DegenerateInputError):
            check_models([])
        with pytest.raises(ContractViolation, match="mode"):
            run_fusion("middle", [audio], test)
        with pytest.raises(ContractViolation, match="fitted"):
            run_fusion("early", [audio], test)
        with pytest.raises(DegenerateInputError):
            run_fusion("late", [audio], select_modality(test, "text"))
