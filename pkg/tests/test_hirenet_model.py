import dataclasses
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from factories import make_interview, random_arrays, tiny_config
from hirenet.autodiff import backward, leaves_from, numerical_gradient
from hirenet.errors import ContractViolation, DegenerateInputError, LookupContractError
from hirenet.lib.encoders import SequenceBatchItem
from hirenet.lib.collate import collate_batch, pad_interview
from hirenet.lib.hirenet import bce_loss, forward_interview, interview_loss, label_for
from hirenet.lib.parameters import glorot_bound, init_model, is_bias, parameter_shapes
from scalar_oracle import hirenet_score

VARIANTS = ["hirenet", "hn_satt", "hn_avg", "bigru_answerwise"]


def _params(config, seed, scale=0.5):
    params = init_model(config)
    return params.replace(random_arrays(params, np.random.default_rng(seed), scale))


@pytest.mark.parametrize("variant", VARIANTS)
def test_init_is_deterministic_and_bounded(variant):
    config = tiny_config(variant, dim=3)
    first, second = init_model(config), init_model(config)
    for name, shape in parameter_shapes(config).items():
        assert first[name].shape == shape
        assert_array_equal(first[name], second[name])
        if is_bias(name):
            assert np.all(first[name] == 0)
        elif not name.startswith("embeddings."):
            assert np.abs(first[name]).max() <= glorot_bound(shape)


def test_variants_only_hold_what_they_read():
    hirenet = parameter_shapes(tiny_config("hirenet"))
    satt = parameter_shapes(tiny_config("hn_satt"))
    avg = parameter_shapes(tiny_config("hn_avg"))
    assert "job.W_z" in hirenet and "low_attention.W_ctx" in hirenet
    assert "job.W_z" not in satt and "low_attention.W_ctx" not in satt and "low_attention.u" in satt
    assert not any(name.startswith(("low_attention", "high_attention")) for name in avg)
    assert hirenet["high.fwd.W_z"] == (2, 2 + 4)
    assert hirenet["classifier.W_v"] == (1, 4)


def test_self_attention_model_ignores_the_job_title(rng):
    config = tiny_config("hn_satt")
    params = _params(config, 4)
    interview = make_interview(rng, [4, 3])
    retitled = interview.model_copy(update={"job_tokens": [1, 2, 3, 4, 5]})
    assert forward_interview(params, config, retitled).score == forward_interview(params, config, interview).score


@pytest.mark.parametrize("variant", VARIANTS)
def test_zero_parameters_score_one_half(variant, rng):
    config = tiny_config(variant)
    params = init_model(config)
    params = params.replace({name: np.zeros_like(value) for name, value in params.items()})
    prediction = forward_interview(params, config, make_interview(rng, [4, 3]))
    assert prediction.score == 0.5
    assert prediction.label == "hirable"
    assert_array_equal(prediction.representation, 0.0)


@pytest.mark.parametrize("dim", [1, 2])
def test_matches_the_scalar_oracle(dim):
    config = tiny_config("hirenet", dim=dim, feature_dim=dim, low_attention_dim=dim, high_attention_dim=dim)
    for seed in range(25):
        rng = np.random.default_rng(seed)
        interview = make_interview(rng, rng.integers(1, 4, size=rng.integers(1, 3)).tolist(), feature_dim=dim,
                                   question_lengths=[int(rng.integers(1, 3)), int(rng.integers(1, 3))])
        params = _params(config, seed, scale=1.0)
        assert abs(forward_interview(params, config, interview).score - hirenet_score(params, interview)) < 1e-10


def test_question_order_matters():
    config = tiny_config("hirenet")
    changed = 0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        interview = make_interview(rng, [4, 3, 5])
        permuted = interview.model_copy(update={"qa": interview.qa[::-1]})
        params = _params(config, seed)
        if forward_interview(params, config, interview).score != forward_interview(params, config, permuted).score:
            changed += 1
    assert changed >= 19


@pytest.mark.parametrize("variant", VARIANTS)
@pytest.mark.parametrize("modality", ["audio", "text"])
def test_padding_is_bit_identical(variant, modality, rng):
    config = tiny_config(variant, modality=modality)
    params = _params(config, 3)
    short = make_interview(rng, [3, 2], modality=modality, candidate_id="a")
    long = make_interview(rng, [6, 5, 4], modality=modality, candidate_id="b", question_lengths=[3, 3, 3],
                          job_length=4)
    alone = forward_interview(params, config, short)
    padded = collate_batch([short, long])[0]
    batched = forward_interview(params, config, padded)
    assert alone.score == batched.score
    assert_array_equal(alone.representation, batched.representation)


def test_averaging_variant_reports_uniform_attention(rng):
    config = tiny_config("hn_avg")
    prediction = forward_interview(_params(config, 0), config, make_interview(rng, [5, 4]))
    assert prediction.trace.uniform
    assert_allclose(prediction.trace.frame_alphas[0], 0.2)
    assert_allclose(prediction.trace.question_alphas, 0.5)
    assert 0 < prediction.score < 1


def test_zero_attention_vectors_reduce_hirenet_to_averaging(rng):
    config = tiny_config("hirenet")
    params = _params(config, 7)
    flat = params.replace({"low_attention.u": np.zeros(4), "high_attention.u": np.zeros(4)})
    averaged = init_model(tiny_config("hn_avg"))
    averaged = averaged.replace({n: flat[n] for n in averaged})
    interview = make_interview(rng, [4, 3])
    assert forward_interview(flat, config, interview).score == pytest.approx(
        forward_interview(averaged, tiny_config("hn_avg"), interview).score, abs=1e-12)
    assert_allclose(forward_interview(flat, config, interview).trace.frame_alphas[0], 0.25, atol=1e-15)


def _check_model_gradients(variant, seed):
    rng = np.random.default_rng(seed)
    config = tiny_config(variant, vocab_size=8)
    arrays = dict(_params(config, seed))
    interview = make_interview(rng, [3, 2], vocab=8, y=seed % 2)

    def loss(leaves):
        return interview_loss(config, leaves, interview)[0]

    leaves = leaves_from(arrays)
    analytic = backward(loss(leaves), leaves)
    numeric = numerical_gradient(loss, arrays, 1e-5)
    for name in arrays:
        assert_allclose(analytic[name], numeric[name], rtol=1e-4, atol=1e-8, err_msg=name)


@pytest.mark.parametrize("seed", range(10))
def test_hirenet_gradients(seed):
    _check_model_gradients("hirenet", seed)


@pytest.mark.parametrize("variant", ["hn_satt", "hn_avg", "bigru_answerwise"])
@pytest.mark.parametrize("seed", range(3))
def test_ablation_gradients(variant, seed):
    _check_model_gradients(variant, seed)


@pytest.mark.parametrize("modality", ["text", "video"])
def test_text_and_video_models_score(modality, rng):
    feature_dim = 6 if modality == "video" else 3
    config = tiny_config("hirenet", modality=modality, feature_dim=feature_dim)
    interview = make_interview(rng, [4, 3], modality=modality, feature_dim=feature_dim)
    prediction = forward_interview(init_model(config), config, interview)
    assert 0 < prediction.score < 1
    assert len(prediction.trace.frame_alphas) == 2
    assert prediction.representation.shape == (4,)


def test_answerwise_scores_are_averaged(rng):
    config = tiny_config("bigru_answerwise")
    params = _params(config, 2)
    prediction = forward_interview(params, config, make_interview(rng, [4, 3, 2]))
    assert prediction.answer_scores.shape == (3,)
    assert prediction.score == pytest.approx(prediction.answer_scores.mean(), abs=1e-15)


def test_bce_loss_values():
    assert bce_loss(0.5, 1) == pytest.approx(math.log(2))
    assert bce_loss(0.25, 1) == pytest.approx(math.log(4))
    assert bce_loss(0.9, 1) < bce_loss(0.6, 1)
    with pytest.raises(ContractViolation):
        bce_loss(0.5, -1)


def test_label_threshold_boundary():
    assert label_for(0.5, 0.5) == "hirable"
    assert label_for(0.4999999, 0.5) == "not_hirable"


def test_degenerate_and_mismatched_inputs(rng):
    config = tiny_config("hirenet")
    params = init_model(config)
    interview = make_interview(rng, [3, 2])
    with pytest.raises(ContractViolation, match="audio model cannot read text"):
        forward_interview(params, config, make_interview(rng, [3], modality="text"))
    with pytest.raises(ContractViolation, match="expects 3"):
        forward_interview(params, config, make_interview(rng, [3], feature_dim=5))
    with pytest.raises(LookupContractError):
        forward_interview(params, config, make_interview(rng, [3], vocab=40).model_copy(update={"job_tokens": [99]}))
    padded = pad_interview(interview)
    emptied = SequenceBatchItem(padded.answers[1].features, np.zeros(padded.answers[1].length, dtype=bool))
    broken = dataclasses.replace(padded, answers=[padded.answers[0], emptied])
    with pytest.raises(DegenerateInputError, match="answer 1"):
        forward_interview(params, config, broken)
