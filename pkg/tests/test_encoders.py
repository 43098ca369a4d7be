import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from scipy.special import expit

from hirenet.autodiff import Tensor, affine, concat, grad_check, take
from hirenet.errors import ContractViolation, DegenerateInputError, LookupContractError
from hirenet.lib.encoders import BiGRUParams, GRUCellParams, SequenceBatchItem, bigru_final_states, bigru_run, \
    embed_tokens, encode_token_sequence, gru_run, gru_step


def _cell_arrays(rng, prefix, input_dim, hidden):
    arrays = {}
    for gate in "zrh":
        arrays[f"{prefix}.W_{gate}"] = rng.normal(size=(hidden, input_dim))
        arrays[f"{prefix}.U_{gate}"] = rng.normal(size=(hidden, hidden))
        arrays[f"{prefix}.b_{gate}"] = rng.normal(size=hidden)
    return arrays


def _leaves(arrays):
    return {k: Tensor.leaf(v, k) for k, v in arrays.items()}


def _bigru(rng, input_dim=3, hidden=2):
    arrays = {**_cell_arrays(rng, "enc.fwd", input_dim, hidden), **_cell_arrays(rng, "enc.bwd", input_dim, hidden)}
    return BiGRUParams.from_leaves(_leaves(arrays), "enc"), arrays


def test_gru_step_matches_closed_form(rng):
    arrays = _cell_arrays(rng, "cell", 3, 2)
    cell = GRUCellParams.from_leaves(_leaves(arrays), "cell")
    x, h = rng.normal(size=3), rng.normal(size=2)
    a = arrays
    z = expit(a["cell.W_z"] @ x + a["cell.U_z"] @ h + a["cell.b_z"])
    r = expit(a["cell.W_r"] @ x + a["cell.U_r"] @ h + a["cell.b_r"])
    candidate = np.tanh(a["cell.W_h"] @ x + a["cell.U_h"] @ (r * h) + a["cell.b_h"])
    expected = (1 - z) * h + z * candidate
    assert_allclose(gru_step(cell, Tensor.constant(x), Tensor.constant(h)).values, expected, rtol=1e-12)


def _scalar_cell(**values):
    return GRUCellParams(**{field: Tensor.constant(np.full((1, 1) if field[0] in "WU" else 1, values.get(field, 0.0)))
                            for field in GRUCellParams._fields})


def test_gru_step_with_zero_parameters_stays_at_zero(rng):
    cell = _scalar_cell()
    assert gru_step(cell, Tensor.constant(rng.normal(size=1)), Tensor.constant(np.zeros(1))).item() == 0.0


def test_gru_step_with_saturated_gates():
    cell = _scalar_cell(b_z=100.0, b_r=100.0, W_h=1.0)
    h = gru_step(cell, Tensor.constant([0.5]), Tensor.constant([0.0])).item()
    assert h == pytest.approx(math.tanh(0.5), abs=1e-4)
    assert h == pytest.approx(0.46212, abs=1e-4)


def test_gru_step_matches_scalar_arithmetic():
    cell = _scalar_cell(**{field: 0.1 for field in GRUCellParams._fields})
    x, h_prev = 1.0, 0.5
    z = 1 / (1 + math.exp(-(0.1 * x + 0.1 * h_prev + 0.1)))
    r = 1 / (1 + math.exp(-(0.1 * x + 0.1 * h_prev + 0.1)))
    candidate = math.tanh(0.1 * x + 0.1 * (r * h_prev) + 0.1)
    expected = (1 - z) * h_prev + z * candidate
    assert gru_step(cell, Tensor.constant([x]), Tensor.constant([h_prev])).item() == pytest.approx(expected, abs=1e-14)


def test_gru_run_padding_copies_last_state(rng):
    arrays = _cell_arrays(rng, "cell", 3, 2)
    cell = GRUCellParams.from_leaves(_leaves(arrays), "cell")
    frames = rng.normal(size=(4, 3))
    states, last = gru_run(cell, SequenceBatchItem.from_array(frames))
    padded_frames = np.vstack([frames, rng.normal(size=(3, 3))])
    padded, padded_last = gru_run(cell, SequenceBatchItem.from_array(padded_frames, true_length=4))
    assert_array_equal(padded.values[:4], states.values)
    assert_array_equal(padded.values[4:], np.repeat(states.values[-1:], 3, axis=0))
    assert_array_equal(last.values, padded_last.values)


def test_bigru_is_bit_identical_under_padding(rng):
    cell, _ = _bigru(rng)
    frames = rng.normal(size=(5, 3))
    plain = bigru_run(cell, SequenceBatchItem.from_array(frames))
    garbage = np.vstack([frames, rng.normal(size=(4, 3)) * 100])
    padded = bigru_run(cell, SequenceBatchItem.from_array(garbage, true_length=5))
    assert_array_equal(padded.values[:5], plain.values)


def test_bigru_rows_concatenate_both_directions(rng):
    cell, _ = _bigru(rng, hidden=2)
    frames = rng.normal(size=(4, 3))
    states = bigru_run(cell, SequenceBatchItem.from_array(frames))
    forward, _ = gru_run(cell.forward, SequenceBatchItem.from_array(frames))
    backward, _ = gru_run(cell.backward, SequenceBatchItem.from_array(frames[::-1]))
    assert_allclose(states.values[:, :2], forward.values, rtol=1e-12)
    assert_allclose(states.values[:, 2:], backward.values[::-1], rtol=1e-12)
    final = bigru_final_states(cell, SequenceBatchItem.from_array(frames))
    assert_allclose(final.values, np.concatenate([forward.values[-1], backward.values[-1]]), rtol=1e-12)


@pytest.mark.parametrize("seed", range(50))
def test_bigru_mirrors_under_reversal(seed):
    rng = np.random.default_rng(seed)
    cell, _ = _bigru(rng, input_dim=3, hidden=2)
    frames = rng.normal(size=(int(rng.integers(1, 7)), 3))
    states = bigru_run(cell, SequenceBatchItem.from_array(frames)).values
    mirrored = bigru_run(cell.swapped(), SequenceBatchItem.from_array(frames[::-1])).values
    expected = np.hstack([states[::-1, 2:], states[::-1, :2]])
    assert_allclose(mirrored, expected, rtol=1e-12, atol=1e-15)


@pytest.mark.parametrize("seed", range(10))
def test_bigru_gradients(seed):
    rng = np.random.default_rng(seed)
    _, arrays = _bigru(rng)
    arrays["x"] = rng.normal(size=(3, 3))
    weights = Tensor.constant(rng.normal(size=(1, 12)))

    def loss(leaves):
        states = bigru_run(BiGRUParams.from_leaves(leaves, "enc"), SequenceBatchItem(leaves["x"], np.ones(3, bool)))
        return affine(weights, concat([take(states, t) for t in range(3)]))

    assert grad_check(loss, arrays) < 1e-4


@pytest.mark.parametrize("seed", range(5))
def test_token_encoder_gradients(seed):
    rng = np.random.default_rng(seed)
    arrays = {**_cell_arrays(rng, "q", 2, 2), "table": rng.normal(size=(6, 2))}
    weights = Tensor.constant(rng.normal(size=(1, 2)))

    def loss(leaves):
        cell = GRUCellParams.from_leaves(leaves, "q")
        return affine(weights, encode_token_sequence(leaves["table"], cell, [4, 1, 4]))

    assert grad_check(loss, arrays) < 1e-4


def test_token_encoder_ignores_padding(rng):
    arrays = _cell_arrays(rng, "q", 2, 2)
    leaves = _leaves(arrays)
    table = Tensor.constant(rng.normal(size=(6, 2)))
    cell = GRUCellParams.from_leaves(leaves, "q")
    plain = encode_token_sequence(table, cell, [3, 5])
    padded = encode_token_sequence(table, cell, [3, 5, 0, 0], np.array([True, True, False, False]))
    assert_array_equal(plain.values, padded.values)


def test_contract_violations(rng):
    cell, _ = _bigru(rng)
    with pytest.raises(DegenerateInputError):
        bigru_run(cell, SequenceBatchItem.from_array(np.zeros((3, 3)), true_length=0))
    with pytest.raises(ContractViolation):
        bigru_run(cell, SequenceBatchItem.from_array(np.zeros((3, 4))))
    with pytest.raises(ContractViolation, match="prefix"):
        SequenceBatchItem(Tensor.constant(np.zeros((3, 3))), np.array([True, False, True]))
    with pytest.raises(LookupContractError):
        embed_tokens(Tensor.constant(np.zeros((4, 2))), [1, 4])
    with pytest.raises(DegenerateInputError):
        encode_token_sequence(Tensor.constant(np.zeros((4, 2))), cell.forward, [])
