"""
Pooling of encoder states: context-conditioned additive attention, self-attention and averaging.

All three pool only the unmasked rows; masked rows never reach the arithmetic, so their
contents cannot change the result.
"""
from dataclasses import dataclass, field
from typing import List, Mapping, NamedTuple, Optional, Tuple

import numpy as np

from ..autodiff import Tensor, affine, softmax_masked, take, tanh, weighted_sum
from ..errors import ContractViolation, DegenerateInputError


class ContextAttentionParams(NamedTuple):
    """
    ``u_t = tanh(W_state h_t + W_ctx c + b)``, scored against ``u``.

    ``W_ctx`` is ``None`` for self-attention.
    """
    W_state: Tensor
    b: Tensor
    u: Tensor
    W_ctx: Optional[Tensor] = None

    @classmethod
    def from_leaves(cls, leaves: Mapping[str, Tensor], prefix: str) -> "ContextAttentionParams":
        return cls(W_state=leaves[f"{prefix}.W_state"],
                   b=leaves[f"{prefix}.b"],
                   u=leaves[f"{prefix}.u"],
                   W_ctx=leaves.get(f"{prefix}.W_ctx"))

    def without_context(self) -> "ContextAttentionParams":
        return self._replace(W_ctx=None)


def _unmasked(states: Tensor, mask: np.ndarray) -> Tuple[Tensor, np.ndarray]:
    mask = np.asarray(mask, dtype=bool)
    if states.values.ndim != 2 or mask.shape != (states.shape[0],):
        raise ContractViolation(f"states {states.shape} do not match mask {mask.shape}")
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        raise DegenerateInputError("cannot pool a sequence with every step masked")
    return take(states, idx), mask


def _scatter(alphas: Tensor, mask: np.ndarray) -> np.ndarray:
    full = np.zeros(mask.shape)
    full[mask] = alphas.values
    return full


def _additive(states: Tensor, mask: np.ndarray, bias: Tensor, params: ContextAttentionParams) -> Tuple[Tensor, np.ndarray]:
    rows, mask = _unmasked(states, mask)
    if params.W_state.shape[1] != states.shape[1]:
        raise ContractViolation(f"W_state {params.W_state.shape} does not apply to states {states.shape}")
    projected = tanh(affine(params.W_state, rows, bias))
    alphas = softmax_masked(affine(projected, params.u))
    return weighted_sum(alphas, rows), _scatter(alphas, mask)


def context_attention(states: Tensor, mask: np.ndarray, ctx: Tensor, params: ContextAttentionParams) -> Tuple[Tensor, np.ndarray]:
    """
    Additive attention conditioned on a context vector (question or job title).

    Args:
        states: ``(T, D)`` encoder states.
        mask: Boolean vector of length ``T``.
        ctx: Context vector, ``(ctx_dim,)``.
        params: Attention weights; ``W_ctx`` must be present.

    Returns:
        ``(pooled, alphas)``: ``Σ α_t h_t`` and the full-length weights (0 on masked steps).
    """
    if params.W_ctx is None:
        raise ContractViolation("context attention needs W_ctx")
    if ctx.shape != (params.W_ctx.shape[1],):
        raise ContractViolation(f"context {ctx.shape} does not match W_ctx {params.W_ctx.shape}")
    # the context term is constant over steps, so it folds into the bias
    bias = affine(params.W_ctx, ctx, params.b)
    return _additive(states, mask, bias, params)


def self_attention(states: Tensor, mask: np.ndarray, params: ContextAttentionParams) -> Tuple[Tensor, np.ndarray]:
    """Additive attention without context: ``u_t = tanh(W_state h_t + b)``."""
    return _additive(states, mask, params.b, params)


def average_pool(states: Tensor, mask: np.ndarray) -> Tensor:
    """Arithmetic mean of the unmasked rows."""
    rows, _ = _unmasked(states, mask)
    count = rows.shape[0]
    return weighted_sum(Tensor.constant(np.full(count, 1.0 / count)), rows)


def relative_attention(alphas: np.ndarray, mask: Optional[np.ndarray] = None) -> np.ndarray:
    """Attention multiplied by the number of unmasked steps (1 everywhere when uniform)."""
    alphas = np.asarray(alphas, dtype=np.float64)
    mask = np.ones(alphas.shape, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
    return np.where(mask, alphas * mask.sum(), 0.0)


@dataclass
class AttentionTrace:
    """
    Attention weights of one forward pass and their length-normalized values.

    Attributes:
        frame_alphas: Per answer, the low-level weights ``α_t^i`` over unmasked steps.
        question_alphas: High-level weights ``α_i`` over questions.
        uniform: True when the variant averages instead of attending.
    """
    frame_alphas: List[np.ndarray] = field(default_factory=list)
    question_alphas: np.ndarray = field(default_factory=lambda: np.zeros(0))
    uniform: bool = False

    @classmethod
    def uniform_for(cls, lengths: List[int]) -> "AttentionTrace":
        return cls([np.full(n, 1.0 / n) for n in lengths], np.full(len(lengths), 1.0 / len(lengths)), uniform=True)

    @property
    def relative_word(self) -> List[np.ndarray]:
        """``p_w = α_t^i · l_{A_i}`` per answer."""
        return [relative_attention(a) for a in self.frame_alphas]

    @property
    def relative_question(self) -> np.ndarray:
        """``p_q = α_i · n``."""
        return relative_attention(self.question_alphas)

    @property
    def combined(self) -> List[np.ndarray]:
        """``√p_q · p_w`` for every low-level step of every answer."""
        p_q = self.relative_question
        return [np.sqrt(p_q[i]) * p_w for i, p_w in enumerate(self.relative_word)]
