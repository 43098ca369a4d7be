import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from hirenet.autodiff import Tensor, affine, backward, binary_cross_entropy, concat, grad_check, hadamard, \
    primitive_apply, scalar_combine, sigmoid, softmax_masked, stack, take, tanh, weighted_sum
from hirenet.errors import ContractViolation, DegenerateInputError, NumericError

TOLERANCE = 1e-4


def _sum_of(out: Tensor, weights: np.ndarray) -> Tensor:
    """A scalar that depends on every entry of ``out`` with distinct weights."""
    flat = out if out.values.ndim == 1 else concat([take(out, i) for i in range(out.shape[0])])
    return affine(Tensor.constant(weights.reshape(1, -1)), flat)


def _check(build, params, rng):
    out_shape = build({k: Tensor.leaf(v, k) for k, v in params.items()}).shape
    weights = rng.normal(size=int(np.prod(out_shape)) or 1)
    assert grad_check(lambda leaves: _sum_of(build(leaves), weights), params) < TOLERANCE


@pytest.mark.parametrize("seed", range(100))
def test_elementwise_gradients(seed):
    rng = np.random.default_rng(seed)
    params = {"a": rng.normal(size=4), "b": rng.normal(size=4)}
    _check(lambda p: tanh(p["a"]), params, rng)
    _check(lambda p: sigmoid(p["a"]), params, rng)
    _check(lambda p: hadamard(p["a"], p["b"]), params, rng)
    _check(lambda p: scalar_combine([p["a"], p["b"]], [0.3, -1.7], const=2.0), params, rng)


@pytest.mark.parametrize("seed", range(100))
def test_affine_gradients(seed):
    rng = np.random.default_rng(seed)
    params = {"W": rng.normal(size=(3, 4)), "x": rng.normal(size=4), "b": rng.normal(size=3),
              "X": rng.normal(size=(5, 4))}
    _check(lambda p: affine(p["W"], p["x"], p["b"]), params, rng)
    _check(lambda p: affine(p["W"], p["X"], p["b"]), params, rng)
    _check(lambda p: affine(p["W"], p["x"]), params, rng)


@pytest.mark.parametrize("seed", range(100))
def test_structural_gradients(seed):
    rng = np.random.default_rng(seed)
    params = {"a": rng.normal(size=3), "b": rng.normal(size=3), "M": rng.normal(size=(4, 3)),
              "N": rng.normal(size=(4, 2))}
    _check(lambda p: concat([p["a"], p["b"]]), params, rng)
    _check(lambda p: concat([p["M"], p["N"]], axis=1), params, rng)
    _check(lambda p: stack([p["a"], p["b"], p["a"]]), params, rng)
    _check(lambda p: take(p["M"], [2, 0, 2]), params, rng)
    _check(lambda p: take(p["M"], 1), params, rng)


@pytest.mark.parametrize("seed", range(100))
def test_softmax_and_pooling_gradients(seed):
    rng = np.random.default_rng(seed)
    params = {"s": rng.normal(size=5), "w": rng.normal(size=4), "H": rng.normal(size=(4, 3))}
    mask = np.array([True, True, True, False, False])
    _check(lambda p: softmax_masked(p["s"]), params, rng)
    _check(lambda p: softmax_masked(p["s"], mask), params, rng)
    _check(lambda p: weighted_sum(p["w"], p["H"]), params, rng)


@pytest.mark.parametrize("label", [0, 1])
def test_bce_gradient(label):
    rng = np.random.default_rng(label)
    for _ in range(100):
        params = {"x": rng.normal(size=1)}
        assert grad_check(lambda p: binary_cross_entropy(sigmoid(p["x"]), label), params) < TOLERANCE


def test_bce_values():
    assert binary_cross_entropy(Tensor.constant([0.5]), 1).item() == pytest.approx(math.log(2))
    assert binary_cross_entropy(Tensor.constant([0.5]), 0).item() == pytest.approx(math.log(2))
    assert binary_cross_entropy(Tensor.constant([0.25]), 1).item() == pytest.approx(math.log(4))
    assert binary_cross_entropy(Tensor.constant([1.0]), 1).item() == pytest.approx(0.0, abs=1e-11)
    assert np.isfinite(binary_cross_entropy(Tensor.constant([1.0]), 0).item())
    with pytest.raises(ContractViolation):
        binary_cross_entropy(Tensor.constant([0.5]), 2)


def test_softmax_masked_entries_are_zero_and_normalized():
    out = softmax_masked(Tensor.constant([1000.0, 1001.0, -3.0, 7.0]), np.array([True, True, True, False]))
    assert out.values[3] == 0.0
    assert abs(out.values.sum() - 1.0) < 1e-12
    with pytest.raises(DegenerateInputError):
        softmax_masked(Tensor.constant([1.0, 2.0]), np.array([False, False]))


def test_softmax_examples():
    assert_array_equal(softmax_masked(Tensor.constant([3.7]), np.array([True])).values, [1.0])
    assert_allclose(softmax_masked(Tensor.constant([0.0, 0.0, 0.0])).values, [1 / 3] * 3, rtol=0, atol=1e-15)
    assert_allclose(softmax_masked(Tensor.constant([math.log(2), 0.0])).values, [2 / 3, 1 / 3], rtol=0, atol=1e-15)
    out = softmax_masked(Tensor.constant([5.0, 9.0, 1.0]), np.array([True, True, False]))
    total = math.exp(5) + math.exp(9)
    assert_allclose(out.values[:2], [math.exp(5) / total, math.exp(9) / total], rtol=1e-13)
    assert out.values[2] == 0.0


@pytest.mark.parametrize("seed", range(20))
def test_softmax_ignores_a_shift_of_the_scores(seed):
    rng = np.random.default_rng(seed)
    scores = rng.normal(scale=5.0, size=6)
    mask = np.arange(6) < int(rng.integers(1, 7))
    shift = rng.uniform(-50.0, 50.0)
    plain = softmax_masked(Tensor.constant(scores), mask).values
    shifted = softmax_masked(Tensor.constant(np.where(mask, scores + shift, scores)), mask).values
    assert_allclose(shifted, plain, rtol=0, atol=1e-12)
    assert np.all(plain >= 0) and abs(plain.sum() - 1.0) < 1e-12


def test_primitive_examples():
    identity = affine(Tensor.constant(np.eye(2)), Tensor.constant([7.0, -1.0]), Tensor.constant(np.zeros(2)))
    assert_array_equal(identity.values, [7.0, -1.0])
    assert sigmoid(Tensor.constant([0.0])).item() == 0.5
    assert tanh(Tensor.constant([0.0])).item() == 0.0
    out = affine(Tensor.constant([[1.0, 2.0], [3.0, 4.0]]), Tensor.constant([1.0, 1.0]), Tensor.constant([0.0, 1.0]))
    assert_array_equal(out.values, [3.0, 8.0])


def test_backward_examples():
    x = Tensor.leaf(np.zeros(1), "x")
    assert backward(sigmoid(x), {"x": x})["x"][0] == pytest.approx(0.25, abs=1e-15)
    x = Tensor.leaf(np.zeros(1), "x")
    assert backward(tanh(x), {"x": x})["x"][0] == pytest.approx(1.0, abs=1e-15)
    z = Tensor.leaf(np.array([0.3]), "z")
    gradient = backward(binary_cross_entropy(sigmoid(z), 1), {"z": z})["z"][0]
    assert gradient == pytest.approx(1 / (1 + math.exp(-0.3)) - 1, abs=1e-12)


def test_grad_check_examples():
    assert grad_check(lambda p: hadamard(p["x"], p["x"]), {"x": np.array([3.0])}) < 1e-7
    assert grad_check(lambda p: sigmoid(p["x"]), {"x": np.zeros(1)}) < 1e-7


def test_leaf_gradients_accumulate_across_calls():
    rng = np.random.default_rng(0)
    W = Tensor.leaf(rng.normal(size=(2, 3)), "W")
    x = Tensor.constant(rng.normal(size=3))
    first = affine(Tensor.constant(np.ones((1, 2))), tanh(affine(W, x)))
    second = affine(Tensor.constant(np.array([[2.0, -1.0]])), sigmoid(affine(W, x)))
    backward(first)
    backward(second)
    accumulated = W.grad.copy()

    W.zero_grad()
    total = add_scalars(first, second)
    backward(total)
    assert_allclose(accumulated, W.grad, rtol=1e-12, atol=1e-15)


def add_scalars(a: Tensor, b: Tensor) -> Tensor:
    return scalar_combine([a, b], [1.0, 1.0])


def test_repeated_take_accumulates():
    source = Tensor.leaf(np.arange(6.0).reshape(3, 2), "source")
    out = take(source, [1, 1, 2])
    backward(affine(Tensor.constant(np.ones((1, 2))), weighted_sum(Tensor.constant(np.ones(3)), out)))
    assert_array_equal(source.grad, [[0, 0], [2, 2], [1, 1]])


def test_unreachable_params_get_zero_gradient():
    a = Tensor.leaf(np.ones(2), "a")
    b = Tensor.leaf(np.ones(3), "b")
    grads = backward(affine(Tensor.constant(np.ones((1, 2))), a), {"a": a, "b": b})
    assert_array_equal(grads["b"], np.zeros(3))


def test_contracts():
    with pytest.raises(ContractViolation, match=r"\(2, 3\)"):
        affine(Tensor.constant(np.ones((2, 3))), Tensor.constant(np.ones(4)))
    with pytest.raises(ContractViolation):
        hadamard(Tensor.constant(np.ones(2)), Tensor.constant(np.ones(3)))
    with pytest.raises(ContractViolation):
        Tensor.constant(np.ones((2, 2, 2)))
    with pytest.raises(ContractViolation):
        take(Tensor.constant(np.ones((2, 2))), 5)
    with pytest.raises(ContractViolation):
        backward(Tensor.constant(np.ones(2)))
    with pytest.raises(ContractViolation):
        primitive_apply("conv", [])


def test_non_finite_values_name_the_node():
    with pytest.raises(NumericError, match="affine"):
        affine(Tensor.constant(np.full((1, 1), 1e308)), Tensor.constant(np.full(1, 1e308)))


def test_primitive_apply_dispatches():
    z = Tensor.constant([0.25, 0.5])
    assert_array_equal(primitive_apply("scalar-combine", [z], coeffs=[-1.0], const=1.0).values, [0.75, 0.5])
