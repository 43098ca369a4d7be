"""
Differentiable primitives.

Each primitive checks its shape contract, computes the forward value with numpy and
registers a backward rule. Rules only add into the gradient buffers of inputs that
require a gradient.
"""
from typing import Callable, Dict, Optional, Sequence, Union

import numpy as np
from scipy.special import expit

from ..errors import ContractViolation, DegenerateInputError
from .tensor import Tensor

Indices = Union[int, Sequence[int], np.ndarray]


def _flow(t: Tensor, delta: np.ndarray) -> None:
    if t.requires_grad:
        t.accumulate(delta)


def affine(W: Tensor, x: Tensor, b: Optional[Tensor] = None) -> Tensor:
    """
    ``W x + b`` for a vector ``x``, or row-wise ``x W^T + b`` for a matrix of rows.

    Args:
        W: Weight matrix, shape ``(m, n)``.
        x: Input vector ``(n,)`` or matrix ``(T, n)``.
        b: Optional bias ``(m,)``.
    """
    if W.values.ndim != 2 or x.values.ndim not in (1, 2) or x.shape[-1] != W.shape[1]:
        raise ContractViolation(f"affine expects W (m, n) and x (n,) or (T, n); got W {W.shape} and x {x.shape}")
    if b is not None and b.shape != (W.shape[0],):
        raise ContractViolation(f"affine bias must have shape ({W.shape[0]},); got {b.shape} for W {W.shape}")

    out = x.values @ W.values.T
    if b is not None:
        out = out + b.values

    def rule(g: np.ndarray) -> None:
        if x.values.ndim == 1:
            _flow(W, np.outer(g, x.values))
        else:
            _flow(W, g.T @ x.values)
        _flow(x, g @ W.values)
        if b is not None:
            _flow(b, g if g.ndim == 1 else g.sum(axis=0))

    inputs = (W, x) if b is None else (W, x, b)
    return Tensor(out, "affine", inputs, rule)


def tanh(x: Tensor) -> Tensor:
    out = np.tanh(x.values)

    def rule(g: np.ndarray) -> None:
        _flow(x, g * (1.0 - out * out))

    return Tensor(out, "tanh", (x,), rule)


def sigmoid(x: Tensor) -> Tensor:
    out = expit(x.values)

    def rule(g: np.ndarray) -> None:
        _flow(x, g * out * (1.0 - out))

    return Tensor(out, "sigmoid", (x,), rule)


def hadamard(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise ContractViolation(f"hadamard needs equal shapes; got {a.shape} and {b.shape}")
    out = a.values * b.values

    def rule(g: np.ndarray) -> None:
        _flow(a, g * b.values)
        _flow(b, g * a.values)

    return Tensor(out, "hadamard", (a, b), rule)


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    """Concatenates vectors (axis 0) or matrices along ``axis``."""
    if not tensors:
        raise DegenerateInputError("concat needs at least one tensor")
    ranks = {t.values.ndim for t in tensors}
    if len(ranks) != 1 or axis >= ranks.pop():
        raise ContractViolation(f"concat along axis {axis} of shapes {[t.shape for t in tensors]}")
    try:
        out = np.concatenate([t.values for t in tensors], axis=axis)
    except ValueError:
        raise ContractViolation(f"concat along axis {axis} of shapes {[t.shape for t in tensors]}")

    sizes = [t.shape[axis] for t in tensors]
    bounds = np.cumsum([0] + sizes)

    def rule(g: np.ndarray) -> None:
        for t, start, stop in zip(tensors, bounds[:-1], bounds[1:]):
            _flow(t, g[start:stop] if axis == 0 else g[:, start:stop])

    return Tensor(out, "concat", tensors, rule)


def scalar_combine(tensors: Sequence[Tensor], coeffs: Sequence[float], const: float = 0.0) -> Tensor:
    """``sum_k coeffs[k] * tensors[k] + const`` over tensors of one shape."""
    if not tensors or len(tensors) != len(coeffs):
        raise ContractViolation(f"scalar-combine needs one coefficient per tensor; got {len(tensors)} and {len(coeffs)}")
    shape = tensors[0].shape
    for t in tensors[1:]:
        if t.shape != shape:
            raise ContractViolation(f"scalar-combine needs equal shapes; got {shape} and {t.shape}")

    out = np.full(shape, const, dtype=np.float64)
    for t, c in zip(tensors, coeffs):
        out = out + c * t.values

    def rule(g: np.ndarray) -> None:
        for t, c in zip(tensors, coeffs):
            _flow(t, c * g)

    return Tensor(out, "scalar-combine", tensors, rule)


def add(*tensors: Tensor) -> Tensor:
    return scalar_combine(tensors, [1.0] * len(tensors))


def softmax_masked(scores: Tensor, mask: Optional[np.ndarray] = None) -> Tensor:
    """
    Softmax over the unmasked entries of a score vector; masked entries are exactly 0.

    The maximum over unmasked entries is subtracted before exponentiation.
    """
    if scores.values.ndim != 1:
        raise ContractViolation(f"softmax_masked expects a vector; got shape {scores.shape}")
    mask = np.ones(scores.shape, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    if mask.shape != scores.shape:
        raise ContractViolation(f"mask shape {mask.shape} does not match scores shape {scores.shape}")
    if not mask.any():
        raise DegenerateInputError("softmax_masked needs at least one unmasked entry")

    kept = scores.values[mask]
    e = np.exp(kept - kept.max())
    out = np.zeros_like(scores.values)
    out[mask] = e / e.sum()

    def rule(g: np.ndarray) -> None:
        _flow(scores, out * (g - np.dot(out, g)))

    return Tensor(out, "softmax", (scores,), rule)


def weighted_sum(weights: Tensor, states: Tensor) -> Tensor:
    """``sum_t weights[t] * states[t]`` for weights ``(T,)`` and states ``(T, d)``."""
    if weights.values.ndim != 1 or states.values.ndim != 2 or weights.shape[0] != states.shape[0]:
        raise ContractViolation(f"weighted_sum expects (T,) and (T, d); got {weights.shape} and {states.shape}")
    out = weights.values @ states.values

    def rule(g: np.ndarray) -> None:
        _flow(weights, states.values @ g)
        _flow(states, np.outer(weights.values, g))

    return Tensor(out, "weighted-sum", (weights, states), rule)


def take(source: Tensor, index: Indices) -> Tensor:
    """
    Selects rows of a matrix or entries of a vector.

    An integer index returns a single row (vector) or entry; a sequence returns the
    stacked rows in the given order. Repeated indices accumulate gradients.
    """
    idx = np.asarray(index)
    if idx.dtype.kind not in "iu":
        raise ContractViolation(f"take expects integer indices; got {idx.dtype}")
    n = source.shape[0] if source.values.ndim else 0
    if idx.size and (idx.min() < 0 or idx.max() >= n):
        raise ContractViolation(f"index out of range for leading dimension {n} of shape {source.shape}")
    out = source.values[idx]

    def rule(g: np.ndarray) -> None:
        if source.requires_grad:
            delta = np.zeros_like(source.values)
            np.add.at(delta, idx, g)
            source.accumulate(delta)

    return Tensor(out, "take", (source,), rule)


def stack(vectors: Sequence[Tensor]) -> Tensor:
    """Stacks equal-length vectors into the rows of a matrix."""
    if not vectors:
        raise DegenerateInputError("stack needs at least one vector")
    shape = vectors[0].shape
    for v in vectors:
        if v.values.ndim != 1 or v.shape != shape:
            raise ContractViolation(f"stack needs vectors of one shape; got {shape} and {v.shape}")
    out = np.stack([v.values for v in vectors])

    def rule(g: np.ndarray) -> None:
        for row, v in enumerate(vectors):
            _flow(v, g[row])

    return Tensor(out, "stack", vectors, rule)


def binary_cross_entropy(score: Tensor, label: int, eps: float = 1e-12) -> Tensor:
    """
    ``-[y ln s + (1 - y) ln(1 - s)]`` for a single score, clamped to ``[eps, 1 - eps]``.
    """
    if label not in (0, 1):
        raise ContractViolation(f"binary cross-entropy labels are 0 or 1; got {label!r}")
    if score.values.size != 1:
        raise ContractViolation(f"binary cross-entropy expects one score; got shape {score.shape}")
    s = float(np.clip(score.values.reshape(-1)[0], eps, 1.0 - eps))
    out = -np.log(s) if label == 1 else -np.log1p(-s)

    def rule(g: np.ndarray) -> None:
        d = -1.0 / s if label == 1 else 1.0 / (1.0 - s)
        _flow(score, np.full(score.shape, float(g) * d))

    return Tensor(np.float64(out), "bce", (score,), rule)


PRIMITIVES: Dict[str, Callable[..., Tensor]] = {
    "affine": affine,
    "tanh": tanh,
    "sigmoid": sigmoid,
    "hadamard": hadamard,
    "concat": lambda *ts, axis=0: concat(ts, axis=axis),
    "scalar-combine": lambda *ts, coeffs, const=0.0: scalar_combine(ts, coeffs, const),
    "softmax": softmax_masked,
    "weighted-sum": weighted_sum,
    "take": take,
    "stack": lambda *ts: stack(ts),
    "bce": binary_cross_entropy,
}


def primitive_apply(kind: str, inputs: Sequence[Tensor], **attrs) -> Tensor:
    """
    Applies a registered primitive by its tag.

    Example:
        ```python
        out = primitive_apply("scalar-combine", [z], coeffs=[-1.0], const=1.0)  # 1 - z
        ```
    """
    try:
        fn = PRIMITIVES[kind]
    except KeyError:
        raise ContractViolation(f"unknown primitive {kind!r}; expected one of {sorted(PRIMITIVES)}")
    return fn(*inputs, **attrs)
