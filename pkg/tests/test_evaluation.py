import json

import numpy as np
import pytest
from numpy.testing import assert_array_equal

from factories import random_arrays, tiny_config
from hirenet.baselines.bow import fit_vocabulary
from hirenet.baselines.linear import train_linear_classifier
from hirenet.errors import CheckpointError, DegenerateInputError
from hirenet.harness.evaluation import evaluate, scores_by_candidate
from hirenet.lib.checkpoint import load_checkpoint, load_fusion, load_linear, load_vocabulary, save_arrays, \
    save_checkpoint, save_fusion, save_linear, save_vocabulary
from hirenet.lib.fusion import fit_early_fusion
from hirenet.lib.parameters import init_model


@pytest.fixture
def params(rng):
    model = init_model(tiny_config())
    return model.replace(random_arrays(model, rng))


class TestCheckpoints:
    def test_model_round_trip_is_exact(self, params, corpus, tmp_path):
        path = save_checkpoint(tmp_path / "model.json", params)
        loaded = load_checkpoint(path)
        assert loaded.frozen and loaded.config == params.config
        for name in params:
            assert_array_equal(loaded[name], params[name])
        assert evaluate(loaded, corpus).scores == evaluate(params, corpus).scores

    def test_wrong_kind(self, tmp_path):
        model = train_linear_classifier(np.array([[0.0], [1.0]]), np.array([0, 1]))
        save_linear(tmp_path / "linear.json", model)
        with pytest.raises(CheckpointError, match="linear checkpoint, not a hirenet"):
            load_checkpoint(tmp_path / "linear.json")

    def test_wrong_version(self, params, tmp_path):
        path = save_checkpoint(tmp_path / "model.json", params)
        data = json.loads(path.read_text())
        data["format_version"] = "hirenet-checkpoint/0"
        path.write_text(json.dumps(data))
        with pytest.raises(CheckpointError, match="format"):
            load_checkpoint(path)

    def test_unreadable_and_malformed_files(self, tmp_path):
        with pytest.raises(CheckpointError, match="cannot read"):
            load_checkpoint(tmp_path / "absent.json")
        (tmp_path / "bad.json").write_text("{\"kind\": \"hirenet\", \"parameters\": [{\"name\": \"a\", "
                                           "\"shape\": [2], \"values\": [1.0]}]}")
        with pytest.raises(CheckpointError, match="valid checkpoint"):
            load_checkpoint(tmp_path / "bad.json")

    def test_missing_and_unknown_parameters(self, params, tmp_path):
        arrays = dict(params)
        config = params.config.model_dump(mode="json")
        save_arrays(tmp_path / "extra.json", "hirenet", {**arrays, "extra.W": np.ones(2)}, config)
        with pytest.raises(CheckpointError, match="extra.W"):
            load_checkpoint(tmp_path / "extra.json")
        del arrays["classifier.W_v"]
        save_arrays(tmp_path / "short.json", "hirenet", arrays, config)
        with pytest.raises(CheckpointError, match="missing classifier.W_v"):
            load_checkpoint(tmp_path / "short.json")

    def test_baseline_checkpoints(self, rng, tmp_path):
        x, y = rng.normal(size=(12, 3)), np.array([0, 1] * 6)
        model = train_linear_classifier(x, y, l2=0.1, standardize=True)
        loaded, config = load_linear(save_linear(tmp_path / "linear.json", model, feature="stats"))
        assert config["feature"] == "stats" and loaded.l2 == 0.1
        assert_array_equal(loaded.predict_proba(x), model.predict_proba(x))
        arrays = {"weights": model.weights, "bias": np.array([model.bias]), "standardizer.mean": np.zeros(3),
                  "standardizer.scale": np.ones(2)}
        save_arrays(tmp_path / "bad_scaler.json", "linear", arrays, {"l2": 0.1})
        with pytest.raises(CheckpointError, match="scaler"):
            load_linear(tmp_path / "bad_scaler.json")

        vocabulary = fit_vocabulary([rng.normal(size=(6, 2)) for _ in range(4)], k=3)
        restored = load_vocabulary(save_vocabulary(tmp_path / "codebook.json", vocabulary))
        answer = rng.normal(size=(5, 2))
        assert_array_equal(restored.encode(answer), vocabulary.encode(answer))

        rows = [{"audio": rng.normal(size=2), "text": rng.normal(size=2)} for _ in range(8)]
        fusion = fit_early_fusion(rows, [0, 1] * 4, ["audio", "text"])
        fused, _ = load_fusion(save_fusion(tmp_path / "fusion.json", fusion))
        assert fused.modalities == ["audio", "text"]
        assert_array_equal(fused.classifier.predict_proba(fused.concatenate(rows[0])),
                           fusion.classifier.predict_proba(fusion.concatenate(rows[0])))


class TestEvaluate:
    def test_scores_every_candidate_of_the_modality(self, params, corpus):
        evaluation = evaluate(params, corpus, split="all")
        audio = [r for r in corpus if r.modality == "audio"]
        assert [s.candidate_id for s in evaluation.scores] == [r.candidate_id for r in audio]
        assert (evaluation.model, evaluation.modality, evaluation.split) == ("hirenet", "audio", "all")
        for score in evaluation.scores:
            assert score.prediction == ("hirable" if score.score >= 0.5 else "not_hirable")
        assert set(scores_by_candidate(evaluation)) == {r.candidate_id for r in audio}

    def test_has_no_side_effects(self, params, corpus):
        before = {name: params[name].copy() for name in params}
        first = evaluate(params, corpus)
        second = evaluate(params, corpus, workers=3)
        assert first == second
        for name in params:
            assert_array_equal(params[name], before[name])

    def test_empty_split(self, params, corpus):
        with pytest.raises(DegenerateInputError):
            evaluate(params, [])
        with pytest.raises(DegenerateInputError):
            evaluate(params, [r for r in corpus if r.modality == "text"])

    def test_model_that_does_not_fit_the_data(self, corpus):
        wide = init_model(tiny_config(feature_dim=5))
        with pytest.raises(CheckpointError, match="expects 5"):
            evaluate(wide, corpus)
        small_vocabulary = init_model(tiny_config(vocab_size=5))
        with pytest.raises(CheckpointError):
            evaluate(small_vocabulary, corpus)
